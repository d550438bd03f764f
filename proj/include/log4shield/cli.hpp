#pragma once

// Command-line front end. Three subcommands:
//   scan: run the scanner over a tree and render a report
//   kb:   print the CVE knowledge base table
//   eval: score the scanner against a corpus manifest
// stdout carries only the report; diagnostics go to stderr. Exit codes:
// 0 clean / below threshold, 1 findings at or above threshold (scan) or an
// imperfect corpus (eval), 2 usage or I/O errors.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "log4shield/eval.hpp"
#include "log4shield/kb.hpp"
#include "log4shield/report.hpp"

namespace log4shield::cli {

struct Env {
    std::optional<std::string> github_workspace;
    std::optional<std::string> kb_override;
    bool no_color = false;

    static Env from_process() {
        Env env;
        if (const char* ws = std::getenv("GITHUB_WORKSPACE")) env.github_workspace = ws;
        if (const char* kb = std::getenv("LOG4SHIELD_KB")) env.kb_override = kb;
        env.no_color = std::getenv("NO_COLOR") != nullptr;
        return env;
    }
};

namespace clidetail {

inline Kb load_kb(const std::optional<std::string>& flag, const Env& env, std::string_view embedded_text) {
    if (flag) return Kb::from_file(*flag);
    if (env.kb_override) return Kb::from_file(*env.kb_override);
    return Kb::from_text(embedded_text, "<embedded>");
}

inline int write_output(const std::string& body, const std::optional<std::string>& output, std::ostream& out,
                        std::ostream& err) {
    if (!output) {
        out << body;
        return 0;
    }
    std::ofstream f(*output, std::ios::binary);
    if (!f) {
        err << "log4shield: cannot write " << *output << "\n";
        return 2;
    }
    f << body;
    return 0;
}

inline std::string kb_table_text(const Kb& kb) {
    std::size_t width = std::string_view("CVE Identifier").size();
    for (const CveRecord& r : kb.records()) width = std::max(width, r.id.size());
    std::string out = "CVE Identifier";
    out += std::string(width - 14 + 2, ' ');
    out += "Score\n";
    for (const CveRecord& r : kb.records()) {
        out += r.id;
        out += std::string(width - r.id.size() + 2, ' ');
        out += r.score_text();
        out += "\n";
    }
    return out;
}

inline std::string kb_table_json(const Kb& kb) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const CveRecord& r : kb.records()) {
        nlohmann::ordered_json je;
        je["id"] = r.id;
        je["score"] = r.base_score();
        je["generation"] = to_string(r.generation);
        if (r.affected) {
            je["affected_low"] = r.affected->low.raw;
            je["affected_high"] = r.affected->high.raw;
            if (!r.affected->exclusions.empty()) {
                je["excludes"] = nlohmann::ordered_json::array();
                for (const auto& v : r.affected->exclusions) je["excludes"].push_back(v.raw);
            }
        }
        if (!r.patterns.empty()) {
            je["patterns"] = nlohmann::ordered_json::array();
            for (PatternId p : r.patterns) je["patterns"].push_back(to_string(p));
        }
        je["recommendation"] = r.recommendation;
        j.push_back(std::move(je));
    }
    return j.dump(2) + "\n";
}

} // namespace clidetail

/// Run the CLI against an argument list (without the program name).
/// `embedded_kb` is the build-time default knowledge base text; `out_is_tty`
/// enables verdict coloring unless NO_COLOR is set.
inline int run(std::vector<std::string> args, std::string_view embedded_kb, std::ostream& out, std::ostream& err,
               const Env& env = Env::from_process(), bool out_is_tty = false) {
    CLI::App app{"log4shield: static scanner for exploitable Log4j usage"};
    app.set_help_all_flag("--help-all");

    std::optional<std::string> kb_path;
    app.add_option("--kb", kb_path, "Knowledge-base file overriding the embedded data (env: LOG4SHIELD_KB)");

    auto* scan = app.add_subcommand("scan", "Scan a directory tree and report findings");
    std::optional<std::string> root_flag;
    std::string format = "text";
    double threshold = 0.0;
    bool strict = false;
    std::vector<std::string> ignore;
    std::vector<std::string> exclude_artifacts;
    std::optional<std::string> output;
    scan->add_option("--root", root_flag, "Directory to scan (env: GITHUB_WORKSPACE; default: .)");
    scan->add_option("--format", format, "Report format: text or json")->check(CLI::IsMember({"text", "json"}));
    scan->add_option("--threshold", threshold, "Exit 1 when a finding scores at or above this value (default 0.0)")
        ->check(CLI::Range(0.0, 10.0));
    scan->add_flag("--strict", strict, "Suppress version-only findings for appender-gated Log4j v1 CVEs");
    scan->add_option("--ignore", ignore, "Glob pattern to skip (repeatable; also read from .log4shieldignore)");
    scan->add_option("--exclude-artifact", exclude_artifacts,
                     "Artifact id never flagged from version evidence (repeatable, e.g. log4j-over-slf4j)");
    scan->add_option("--output", output, "Write the report to a file instead of stdout");

    auto* kb_cmd = app.add_subcommand("kb", "Print the CVE knowledge base, most severe first");
    std::string kb_format = "text";
    kb_cmd->add_option("--format", kb_format, "Output format: text or json")->check(CLI::IsMember({"text", "json"}));

    auto* eval_cmd = app.add_subcommand("eval", "Run the scanner across a corpus manifest and score it");
    std::string manifest_path;
    std::string eval_format = "text";
    bool eval_strict = false;
    eval_cmd->add_option("--manifest", manifest_path, "Corpus manifest file")->required();
    eval_cmd->add_option("--format", eval_format, "Output format: text or json")->check(CLI::IsMember({"text", "json"}));
    eval_cmd->add_flag("--strict", eval_strict, "Scan entries in strict mode");

    app.require_subcommand(1);

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "log4shield: " << e.what() << "\n";
        err << app.help();
        return 2;
    }

    try {
        const Kb kb = clidetail::load_kb(kb_path, env, embedded_kb);

        if (kb_cmd->parsed()) {
            out << (kb_format == "json" ? clidetail::kb_table_json(kb) : clidetail::kb_table_text(kb));
            return 0;
        }

        if (eval_cmd->parsed()) {
            const CorpusManifest manifest = load_manifest(manifest_path);
            ScanConfig config;
            config.strict = eval_strict;
            const EvalResult result = run_corpus(manifest, config, kb);
            out << render_eval(result, eval_format == "json" ? ReportFormat::Json : ReportFormat::Text);
            if (result.total == 0) return 2;
            return (result.correct == result.total && result.errored == 0) ? 0 : 1;
        }

        // scan
        std::string root = root_flag ? *root_flag : env.github_workspace ? *env.github_workspace : ".";
        ScanConfig config;
        config.strict = strict;
        config.ignore_globs = ignore;
        config.excluded_artifacts.insert(exclude_artifacts.begin(), exclude_artifacts.end());
        const ScanReport report = run_scan(root, config, kb);
        const bool color = out_is_tty && !env.no_color && format == "text" && !output;
        const RenderedReport rendered = format == "json" ? render_json(report) : render_text(report, color);
        if (int rc = clidetail::write_output(rendered.body, output, out, err)) return rc;
        return exit_code(report, threshold);
    } catch (const error& e) {
        err << "log4shield: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "log4shield: " << e.what() << "\n";
        return 2;
    }
}

} // namespace log4shield::cli
