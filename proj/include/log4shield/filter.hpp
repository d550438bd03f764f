#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace log4shield {

/// Shell-style glob match against a '/'-separated relative path.
/// '*' and '?' do not cross '/', '**' does.
inline bool glob_match(std::string_view pattern, std::string_view s) {
    if (pattern.empty()) return s.empty();
    if (pattern.size() >= 2 && pattern[0] == '*' && pattern[1] == '*') {
        std::string_view rest = pattern.substr(2);
        if (!rest.empty() && rest.front() == '/') {
            if (glob_match(rest.substr(1), s)) return true; // '**/' may match zero components
        }
        if (glob_match(rest, s)) return true;
        return !s.empty() && glob_match(pattern, s.substr(1));
    }
    char pc = pattern.front();
    if (pc == '*') {
        if (glob_match(pattern.substr(1), s)) return true;
        return !s.empty() && s.front() != '/' && glob_match(pattern, s.substr(1));
    }
    if (s.empty()) return false;
    if (pc == '?') return s.front() != '/' && glob_match(pattern.substr(1), s.substr(1));
    return pc == s.front() && glob_match(pattern.substr(1), s.substr(1));
}

/// What the tree walkers skip: oversized files, binaries (NUL heuristic),
/// well-known build output directories and user-supplied glob patterns.
struct ScanFilter {
    std::uintmax_t max_file_bytes = 16ull * 1024 * 1024;
    std::set<std::string> ignored_dirs = {".git", "target", "build", "node_modules", ".idea"};
    bool binary_detection = true;
    std::vector<std::string> ignore_globs; // matched against root-relative paths

    bool dir_ignored(std::string_view name) const { return ignored_dirs.count(std::string(name)) > 0; }

    /// True when a root-relative path (generic, '/'-separated) is matched by
    /// any ignore glob. Patterns without '/' also match single components.
    bool glob_ignored(std::string_view rel_path) const {
        for (const auto& pat : ignore_globs) {
            if (glob_match(pat, rel_path)) return true;
            if (pat.find('/') == std::string::npos) {
                std::size_t start = 0;
                while (start <= rel_path.size()) {
                    std::size_t slash = rel_path.find('/', start);
                    std::string_view comp = (slash == std::string_view::npos) ? rel_path.substr(start)
                                                                              : rel_path.substr(start, slash - start);
                    if (glob_match(pat, comp)) return true;
                    if (slash == std::string_view::npos) break;
                    start = slash + 1;
                }
            }
        }
        return false;
    }
};

/// Read a `.log4shieldignore` file at the scan root: one glob per line,
/// '#' starts a comment, blank lines skipped.
inline std::vector<std::string> load_ignore_file(const std::filesystem::path& root) {
    std::vector<std::string> globs;
    std::ifstream in(root / ".log4shieldignore");
    if (!in) return globs;
    std::string line;
    while (std::getline(in, line)) {
        std::size_t b = line.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        std::size_t e = line.find_last_not_of(" \t\r");
        std::string trimmed = line.substr(b, e - b + 1);
        if (trimmed.empty() || trimmed.front() == '#') continue;
        globs.push_back(std::move(trimmed));
    }
    return globs;
}

namespace fsdetail {

template <typename Fn>
void walk_sorted(const std::filesystem::path& dir, const std::string& rel_prefix, const ScanFilter& filter, Fn&& fn) {
    namespace fs = std::filesystem;
    std::vector<fs::directory_entry> entries;
    std::error_code ec;
    for (fs::directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec)) entries.push_back(*it);
    std::sort(entries.begin(), entries.end(), [](const fs::directory_entry& a, const fs::directory_entry& b) {
        return a.path().filename().string() < b.path().filename().string();
    });
    for (const auto& entry : entries) {
        const std::string name = entry.path().filename().string();
        const std::string rel = rel_prefix.empty() ? name : rel_prefix + "/" + name;
        std::error_code sec;
        const auto status = entry.symlink_status(sec);
        if (sec) continue;
        if (fs::is_symlink(status)) continue; // never follow links
        if (fs::is_directory(status)) {
            if (filter.dir_ignored(name) || filter.glob_ignored(rel)) continue;
            walk_sorted(entry.path(), rel, filter, fn);
        } else if (fs::is_regular_file(status)) {
            if (filter.glob_ignored(rel)) continue;
            fn(entry.path(), rel);
        }
    }
}

} // namespace fsdetail

/// Visit every regular file under root in sorted order, pruning ignored
/// directories and glob-ignored paths. fn(absolute_path, relative_path).
template <typename Fn>
void walk_files(const std::filesystem::path& root, const ScanFilter& filter, Fn&& fn) {
    fsdetail::walk_sorted(root, "", filter, fn);
}

} // namespace log4shield
