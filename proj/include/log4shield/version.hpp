#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace log4shield {

/// Pre-release qualifier classes, ordered the way Maven orders them:
/// alpha < beta < milestone < rc < snapshot < (unqualified release).
enum class Qualifier : std::uint8_t {
    Alpha = 0,
    Beta = 1,
    Milestone = 2,
    Rc = 3,
    Snapshot = 4,
    None = 5, // unqualified release, sorts after every pre-release
};

/// A parsed Log4j version string. Ordering is total: numeric triple first,
/// then qualifier class, then the qualifier's numeric suffix. Any qualifier
/// sorts strictly before the same numeric triple without one.
struct Log4jVersion {
    int major = 0;
    int minor = 0;
    int patch = 0; // 0 when absent from the source string
    Qualifier qualifier = Qualifier::None;
    int qualifier_num = 0; // beta9 -> 9; plain "beta" -> 0
    std::string raw;       // original text, preserved verbatim

    std::tuple<int, int, int, int, int> order_key() const noexcept {
        return {major, minor, patch, static_cast<int>(qualifier), qualifier_num};
    }

    friend bool operator==(const Log4jVersion& a, const Log4jVersion& b) noexcept {
        return a.order_key() == b.order_key();
    }
    friend std::strong_ordering operator<=>(const Log4jVersion& a, const Log4jVersion& b) noexcept {
        return a.order_key() <=> b.order_key();
    }

    /// Canonical rendering: always three numeric parts, qualifier appended
    /// as "-<name><num>". parse_version(canonical()) round-trips.
    std::string canonical() const {
        std::string s = std::to_string(major) + "." + std::to_string(minor) + "." + std::to_string(patch);
        if (qualifier != Qualifier::None) {
            s += "-";
            s += qualifier_name(qualifier);
            if (qualifier_num > 0) s += std::to_string(qualifier_num);
        }
        return s;
    }

    static std::string_view qualifier_name(Qualifier q) {
        switch (q) {
        case Qualifier::Alpha: return "alpha";
        case Qualifier::Beta: return "beta";
        case Qualifier::Milestone: return "milestone";
        case Qualifier::Rc: return "rc";
        case Qualifier::Snapshot: return "snapshot";
        case Qualifier::None: break;
        }
        return "";
    }
};

/// Triage classification of a version against the vulnerable-range rules.
enum class VulnClass {
    V1Vulnerable,
    V2Vulnerable,
    NotVulnerable,
};

inline std::string_view to_string(VulnClass c) {
    switch (c) {
    case VulnClass::V1Vulnerable: return "log4j-v1-vulnerable";
    case VulnClass::V2Vulnerable: return "log4j-v2-vulnerable";
    case VulnClass::NotVulnerable: return "not-vulnerable";
    }
    return "?";
}

namespace detail {

inline bool parse_uint(std::string_view s, int& out) {
    if (s.empty() || s.size() > 9) return false;
    long v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    out = static_cast<int>(v);
    return true;
}

inline std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

inline std::optional<Qualifier> qualifier_from_word(std::string_view word) {
    const std::string w = lower(word);
    if (w == "alpha") return Qualifier::Alpha;
    if (w == "beta") return Qualifier::Beta;
    if (w == "milestone" || w == "m") return Qualifier::Milestone;
    if (w == "rc" || w == "cr") return Qualifier::Rc;
    if (w == "snapshot") return Qualifier::Snapshot;
    return std::nullopt;
}

} // namespace detail

/// Parse a literal Log4j version string ("1.2.17", "2.0-beta9", "2.23.1").
/// Returns nullopt for anything that is not a plain version: Maven range
/// expressions, unresolved placeholders, unknown qualifiers. Callers treat
/// that as "version undetermined" and fall through to a deep scan.
inline std::optional<Log4jVersion> parse_version(std::string_view text) {
    // trim surrounding whitespace
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r' || text.back() == '\n'))
        text.remove_suffix(1);
    if (text.empty()) return std::nullopt;

    Log4jVersion v;
    v.raw = std::string(text);

    // split off the qualifier at the first '-'; "2.0-beta9" / "2.0.1-rc-2"
    std::string_view numeric = text;
    std::string_view qual;
    if (auto dash = text.find('-'); dash != std::string_view::npos) {
        numeric = text.substr(0, dash);
        qual = text.substr(dash + 1);
        if (qual.empty()) return std::nullopt;
    }

    // numeric part: major(.minor(.patch)?)?
    std::array<int, 3> parts{0, 0, 0};
    std::size_t idx = 0;
    std::size_t start = 0;
    while (true) {
        std::size_t dot = numeric.find('.', start);
        std::string_view seg = (dot == std::string_view::npos) ? numeric.substr(start) : numeric.substr(start, dot - start);
        if (idx >= parts.size() || !detail::parse_uint(seg, parts[idx])) return std::nullopt;
        ++idx;
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    v.major = parts[0];
    v.minor = parts[1];
    v.patch = parts[2];

    if (!qual.empty()) {
        // word, optionally followed by digits ("beta9") or "-9" / ".9"
        std::size_t w = 0;
        while (w < qual.size() && ((qual[w] >= 'a' && qual[w] <= 'z') || (qual[w] >= 'A' && qual[w] <= 'Z'))) ++w;
        if (w == 0) return std::nullopt;
        auto q = detail::qualifier_from_word(qual.substr(0, w));
        if (!q) return std::nullopt;
        v.qualifier = *q;
        std::string_view rest = qual.substr(w);
        if (!rest.empty() && (rest.front() == '-' || rest.front() == '.')) rest.remove_prefix(1);
        if (!rest.empty()) {
            if (!detail::parse_uint(rest, v.qualifier_num)) return std::nullopt;
        }
    }
    return v;
}

/// An inclusive version interval with point exclusions (security patches).
struct VersionRange {
    Log4jVersion low;
    Log4jVersion high;
    std::vector<Log4jVersion> exclusions;

    bool contains(const Log4jVersion& v) const {
        if (v < low || high < v) return false;
        for (const auto& e : exclusions)
            if (e == v) return false;
        return true;
    }
};

inline bool version_in_range(const Log4jVersion& v, const VersionRange& r) {
    return r.contains(v);
}

namespace detail {

// Out-of-band security patches on the 2.x line (Java 6 backports 2.3.x,
// Java 7 backports 2.12.x). Both the {2.3.1, 2.12.3} and {2.3.2, 2.12.4}
// patch lists are honored; the union avoids false positives on either.
inline const std::array<Log4jVersion, 4>& v2_security_patches() {
    static const std::array<Log4jVersion, 4> patches = {
        *parse_version("2.3.1"),
        *parse_version("2.3.2"),
        *parse_version("2.12.3"),
        *parse_version("2.12.4"),
    };
    return patches;
}

} // namespace detail

/// Triage gate: v1 is always flagged, 2.x below 2.17.1 is flagged unless it
/// is one of the security-patched releases. Per-CVE applicability is decided
/// separately by the knowledge base; this class only routes the pipeline.
inline VulnClass classify_version(const Log4jVersion& v) {
    if (v.major == 1) return VulnClass::V1Vulnerable;
    if (v.major == 2) {
        static const Log4jVersion first_safe = *parse_version("2.17.1");
        if (v < first_safe) {
            for (const auto& p : detail::v2_security_patches())
                if (p == v) return VulnClass::NotVulnerable;
            return VulnClass::V2Vulnerable;
        }
    }
    return VulnClass::NotVulnerable;
}

} // namespace log4shield
