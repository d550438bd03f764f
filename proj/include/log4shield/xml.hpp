#pragma once

// Minimal XML reader for Maven pom files: elements, attributes, text,
// comments, CDATA, processing instructions and a tolerated DOCTYPE. Tracks
// the line of every start tag so dependency evidence can point at it.
// Namespace prefixes are stripped; elements are matched by local name.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "log4shield/errors.hpp"

namespace log4shield {

class xml_error : public error {
public:
    xml_error(int line, const std::string& message)
        : error("XML error at line " + std::to_string(line) + ": " + message), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

struct XmlNode {
    std::string name; // local name, namespace prefix removed
    int line = 0;     // 1-based line of the start tag
    std::string text; // concatenated direct character data, entity-decoded
    std::vector<XmlNode> children;

    const XmlNode* child(std::string_view local_name) const {
        for (const auto& c : children)
            if (c.name == local_name) return &c;
        return nullptr;
    }

    std::vector<const XmlNode*> children_named(std::string_view local_name) const {
        std::vector<const XmlNode*> out;
        for (const auto& c : children)
            if (c.name == local_name) out.push_back(&c);
        return out;
    }

    /// Direct text with surrounding whitespace removed.
    std::string trimmed_text() const {
        std::size_t b = text.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return {};
        std::size_t e = text.find_last_not_of(" \t\r\n");
        return text.substr(b, e - b + 1);
    }
};

namespace xmldetail {

class Parser {
public:
    explicit Parser(std::string_view in) : in_(in) {}

    XmlNode parse_document() {
        skip_bom();
        skip_misc();
        if (eof() || peek() != '<') fail("expected root element");
        XmlNode root = parse_element();
        skip_misc();
        if (!eof()) fail("content after root element");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw xml_error(line_, msg); }

    bool eof() const noexcept { return pos_ >= in_.size(); }
    char peek() const noexcept { return in_[pos_]; }
    bool starts_with(std::string_view s) const { return in_.compare(pos_, s.size(), s) == 0; }

    char take() {
        char c = in_[pos_++];
        if (c == '\n') ++line_;
        return c;
    }

    void advance(std::size_t n) {
        for (std::size_t i = 0; i < n && !eof(); ++i) take();
    }

    void skip_ws() {
        while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r' || peek() == '\n')) take();
    }

    void skip_bom() {
        if (in_.compare(0, 3, "\xEF\xBB\xBF") == 0) pos_ = 3;
    }

    void skip_until(std::string_view terminator, const char* what) {
        while (!eof()) {
            if (starts_with(terminator)) {
                advance(terminator.size());
                return;
            }
            take();
        }
        fail(std::string("unterminated ") + what);
    }

    // whitespace, comments, PIs and DOCTYPE between markup
    void skip_misc() {
        while (true) {
            skip_ws();
            if (starts_with("<!--")) {
                advance(4);
                skip_until("-->", "comment");
            } else if (starts_with("<?")) {
                advance(2);
                skip_until("?>", "processing instruction");
            } else if (starts_with("<!DOCTYPE")) {
                int depth = 0;
                while (!eof()) {
                    char c = take();
                    if (c == '[') ++depth;
                    else if (c == ']') --depth;
                    else if (c == '>' && depth == 0) break;
                }
            } else {
                return;
            }
        }
    }

    static bool name_char(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-' ||
               c == '.' || c == ':';
    }

    std::string parse_name() {
        std::size_t start = pos_;
        while (!eof() && name_char(peek())) take();
        if (pos_ == start) fail("expected a name");
        return std::string(in_.substr(start, pos_ - start));
    }

    static std::string local_name(std::string_view qualified) {
        std::size_t colon = qualified.rfind(':');
        return std::string(colon == std::string_view::npos ? qualified : qualified.substr(colon + 1));
    }

    void parse_attributes() {
        while (true) {
            skip_ws();
            if (eof()) fail("unterminated start tag");
            char c = peek();
            if (c == '>' || c == '/' || c == '?') return;
            parse_name();
            skip_ws();
            if (eof() || peek() != '=') fail("expected '=' after attribute name");
            take();
            skip_ws();
            if (eof() || (peek() != '"' && peek() != '\'')) fail("expected quoted attribute value");
            char quote = take();
            while (!eof() && peek() != quote) take();
            if (eof()) fail("unterminated attribute value");
            take();
        }
    }

    void decode_entity(std::string& out) {
        // positioned just past '&'
        std::size_t semi = in_.find(';', pos_);
        if (semi == std::string_view::npos || semi - pos_ > 10) fail("unterminated entity reference");
        std::string_view ent = in_.substr(pos_, semi - pos_);
        if (ent == "lt") out += '<';
        else if (ent == "gt") out += '>';
        else if (ent == "amp") out += '&';
        else if (ent == "apos") out += '\'';
        else if (ent == "quot") out += '"';
        else if (!ent.empty() && ent[0] == '#') {
            long code = 0;
            bool ok = false;
            if (ent.size() > 2 && (ent[1] == 'x' || ent[1] == 'X')) {
                for (char c : ent.substr(2)) {
                    int d = (c >= '0' && c <= '9')   ? c - '0'
                            : (c >= 'a' && c <= 'f') ? c - 'a' + 10
                            : (c >= 'A' && c <= 'F') ? c - 'A' + 10
                                                     : -1;
                    if (d < 0) { ok = false; break; }
                    code = code * 16 + d;
                    ok = true;
                }
            } else {
                for (char c : ent.substr(1)) {
                    if (c < '0' || c > '9') { ok = false; break; }
                    code = code * 10 + (c - '0');
                    ok = true;
                }
            }
            if (!ok || code <= 0 || code > 0x10FFFF) fail("bad character reference");
            // encode as UTF-8
            if (code < 0x80) out += static_cast<char>(code);
            else if (code < 0x800) {
                out += static_cast<char>(0xC0 | (code >> 6));
                out += static_cast<char>(0x80 | (code & 0x3F));
            } else if (code < 0x10000) {
                out += static_cast<char>(0xE0 | (code >> 12));
                out += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
                out += static_cast<char>(0x80 | (code & 0x3F));
            } else {
                out += static_cast<char>(0xF0 | (code >> 18));
                out += static_cast<char>(0x80 | ((code >> 12) & 0x3F));
                out += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
                out += static_cast<char>(0x80 | (code & 0x3F));
            }
        } else {
            fail("unknown entity '&" + std::string(ent) + ";'");
        }
        advance(semi + 1 - pos_);
    }

    XmlNode parse_element() {
        if (take() != '<') fail("expected '<'");
        XmlNode node;
        node.line = line_;
        std::string qualified = parse_name();
        node.name = local_name(qualified);
        parse_attributes();
        if (eof()) fail("unterminated start tag");
        if (peek() == '/') {
            take();
            if (eof() || take() != '>') fail("expected '/>'");
            return node;
        }
        if (take() != '>') fail("malformed start tag <" + qualified + ">");

        while (true) {
            if (eof()) fail("missing </" + qualified + ">");
            if (starts_with("</")) {
                advance(2);
                std::string closing = parse_name();
                if (closing != qualified)
                    fail("mismatched close tag </" + closing + "> for <" + qualified + ">");
                skip_ws();
                if (eof() || take() != '>') fail("malformed close tag");
                return node;
            }
            if (starts_with("<!--")) {
                advance(4);
                skip_until("-->", "comment");
                continue;
            }
            if (starts_with("<![CDATA[")) {
                advance(9);
                std::size_t end = in_.find("]]>", pos_);
                if (end == std::string_view::npos) fail("unterminated CDATA section");
                node.text.append(in_.substr(pos_, end - pos_));
                advance(end + 3 - pos_);
                continue;
            }
            if (starts_with("<?")) {
                advance(2);
                skip_until("?>", "processing instruction");
                continue;
            }
            if (peek() == '<') {
                node.children.push_back(parse_element());
                continue;
            }
            char c = take();
            if (c == '&') decode_entity(node.text);
            else node.text += c;
        }
    }

    std::string_view in_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

} // namespace xmldetail

/// Parse a whole XML document; throws xml_error on malformed input.
inline XmlNode parse_xml(std::string_view text) {
    return xmldetail::Parser(text).parse_document();
}

} // namespace log4shield
