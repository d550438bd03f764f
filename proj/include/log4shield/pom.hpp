#pragma once

// Initial scan: parse Maven pom files, pull out every declared dependency,
// resolve single-level ${property} version placeholders and classify any
// artifact whose id contains "log4j". A pom that fails to parse is reported
// with parse_failed so the pipeline falls through to a deep scan.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "log4shield/errors.hpp"
#include "log4shield/filter.hpp"
#include "log4shield/version.hpp"
#include "log4shield/xml.hpp"

namespace log4shield {

enum class Provenance : std::uint8_t {
    Literal,          // version written out in the dependency element
    PropertyResolved, // ${...} substituted from the same file's properties
    Unresolved,       // placeholder with no matching property, or no version
};

inline std::string_view to_string(Provenance p) {
    switch (p) {
    case Provenance::Literal: return "literal";
    case Provenance::PropertyResolved: return "property_resolved";
    case Provenance::Unresolved: return "unresolved";
    }
    return "?";
}

struct DependencyDecl {
    std::string group_id;
    std::string artifact_id;
    std::optional<std::string> version_text; // as written (may be a placeholder)
    std::optional<Log4jVersion> resolved_version;
    std::string source_file; // root-relative, '/'-separated
    std::optional<int> line; // line of the <dependency> element
    Provenance provenance = Provenance::Unresolved;
    std::optional<std::string> scope;  // annotation only, never affects flagging
    bool optional_dep = false;         // annotation only
    bool dependency_management = false;

    bool is_log4j_artifact() const {
        std::string lowered = detail::lower(artifact_id);
        return lowered.find("log4j") != std::string::npos;
    }

    /// "group:artifact version" plus evidence annotations.
    std::string describe() const {
        std::string s = group_id.empty() ? artifact_id : group_id + ":" + artifact_id;
        if (version_text) s += " " + *version_text;
        std::vector<std::string> notes;
        if (provenance == Provenance::PropertyResolved && resolved_version)
            notes.push_back("resolved to " + resolved_version->raw);
        if (dependency_management) notes.push_back("dependencyManagement");
        if (scope) notes.push_back("scope=" + *scope);
        if (optional_dep) notes.push_back("optional");
        if (!notes.empty()) {
            s += " (";
            for (std::size_t i = 0; i < notes.size(); ++i) {
                if (i) s += ", ";
                s += notes[i];
            }
            s += ")";
        }
        return s;
    }
};

struct InitialScanResult {
    std::vector<DependencyDecl> dependencies;
    std::vector<std::pair<DependencyDecl, VulnClass>> vulnerable;
    bool parse_failed = false;
    std::vector<std::string> scanned_files;
    std::vector<std::string> warnings;

    /// True when some log4j dependency has no usable version; the pipeline
    /// must deep-scan in that case.
    bool has_undetermined_log4j() const {
        for (const auto& d : dependencies)
            if (d.is_log4j_artifact() && !d.resolved_version) return true;
        return false;
    }
};

/// Single-level property substitution. A value that is exactly "${key}" is
/// looked up (absent when the key is missing); plain text passes through;
/// anything else containing "${" cannot be resolved here.
inline std::optional<std::string> resolve_placeholder(const std::string& version_text,
                                                      const std::map<std::string, std::string>& properties) {
    if (version_text.size() >= 3 && version_text.compare(0, 2, "${") == 0 && version_text.back() == '}') {
        std::string key = version_text.substr(2, version_text.size() - 3);
        auto it = properties.find(key);
        if (it == properties.end()) return std::nullopt;
        return it->second;
    }
    if (version_text.find("${") != std::string::npos) return std::nullopt; // embedded placeholder
    return version_text;
}

namespace pomdetail {

inline void collect_dependencies(const XmlNode& node, bool in_management, const std::string& source_file,
                                 const std::map<std::string, std::string>& properties,
                                 std::vector<DependencyDecl>& out) {
    if (node.name == "dependencies") {
        for (const XmlNode* dep : node.children_named("dependency")) {
            DependencyDecl d;
            d.source_file = source_file;
            d.line = dep->line;
            d.dependency_management = in_management;
            if (const XmlNode* g = dep->child("groupId")) d.group_id = g->trimmed_text();
            if (const XmlNode* a = dep->child("artifactId")) d.artifact_id = a->trimmed_text();
            if (const XmlNode* s = dep->child("scope")) d.scope = s->trimmed_text();
            if (const XmlNode* o = dep->child("optional")) d.optional_dep = o->trimmed_text() == "true";
            if (const XmlNode* v = dep->child("version")) {
                std::string text = v->trimmed_text();
                if (!text.empty()) {
                    d.version_text = text;
                    bool was_placeholder = text.find("${") != std::string::npos;
                    if (auto resolved = resolve_placeholder(text, properties)) {
                        d.provenance = was_placeholder ? Provenance::PropertyResolved : Provenance::Literal;
                        d.resolved_version = parse_version(*resolved);
                    } else {
                        d.provenance = Provenance::Unresolved;
                    }
                }
            }
            if (d.artifact_id.empty()) continue;
            out.push_back(std::move(d));
        }
    }
    const bool management = in_management || node.name == "dependencyManagement";
    for (const XmlNode& child : node.children)
        collect_dependencies(child, management, source_file, properties, out);
}

} // namespace pomdetail

/// Scan one pom file. `display_path` is what evidence refers to (usually the
/// root-relative path); it defaults to the file argument itself.
/// `excluded_artifacts` suppresses flagging for exact artifact ids (shim
/// allowlist); excluded dependencies stay in `dependencies`.
inline InitialScanResult scan_pom(const std::filesystem::path& file, const std::set<std::string>& excluded_artifacts = {},
                                  std::string display_path = {}) {
    InitialScanResult result;
    if (display_path.empty()) display_path = file.generic_string();
    result.scanned_files.push_back(display_path);

    std::ifstream in(file, std::ios::binary);
    if (!in) {
        result.parse_failed = true;
        result.warnings.push_back(display_path + ": cannot open file");
        return result;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string content = buf.str();

    XmlNode root;
    try {
        root = parse_xml(content);
    } catch (const xml_error& e) {
        result.parse_failed = true;
        result.warnings.push_back(display_path + ": " + e.what());
        return result;
    }

    std::map<std::string, std::string> properties;
    if (const XmlNode* props = root.child("properties"))
        for (const XmlNode& p : props->children) properties[p.name] = p.trimmed_text();

    pomdetail::collect_dependencies(root, false, display_path, properties, result.dependencies);

    for (const auto& dep : result.dependencies) {
        if (!dep.is_log4j_artifact()) continue;
        if (excluded_artifacts.count(dep.artifact_id)) continue;
        if (!dep.resolved_version) continue; // undetermined: handled by the deep-scan gate
        VulnClass cls = classify_version(*dep.resolved_version);
        if (cls != VulnClass::NotVulnerable) result.vulnerable.emplace_back(dep, cls);
    }
    return result;
}

/// Every file named exactly "pom.xml" under root, as root-relative paths in
/// lexicographic order. Ignored directories and glob patterns are skipped.
inline std::vector<std::filesystem::path> discover_poms(const std::filesystem::path& root,
                                                        const ScanFilter& filter = ScanFilter{}) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(root, ec))
        throw scan_error("no such directory: " + root.string());
    std::vector<std::string> rels;
    walk_files(root, filter, [&](const fs::path&, const std::string& rel) {
        std::size_t slash = rel.rfind('/');
        std::string_view name = slash == std::string::npos ? std::string_view(rel)
                                                           : std::string_view(rel).substr(slash + 1);
        if (name == "pom.xml") rels.push_back(rel);
    });
    std::sort(rels.begin(), rels.end());
    std::vector<fs::path> out;
    out.reserve(rels.size());
    for (auto& r : rels) out.emplace_back(r);
    return out;
}

} // namespace log4shield
