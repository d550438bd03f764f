#include <catch2/catch_amalgamated.hpp>

#include "log4shield/kb_default.hpp"
#include "log4shield/pipeline.hpp"
#include "support.hpp"

using namespace log4shield;
using testsupport::TempDir;
using testsupport::fixtures_dir;
using testsupport::write_file;

namespace {

std::filesystem::path scenario(const char* name) { return fixtures_dir() / "scenarios" / name; }

std::set<std::string> finding_ids(const ScanReport& r) {
    std::set<std::string> out;
    for (const auto& f : r.findings) out.insert(f.cve_id);
    return out;
}

const Finding* find_finding(const ScanReport& r, std::string_view id) {
    for (const auto& f : r.findings)
        if (f.cve_id == id) return &f;
    return nullptr;
}

} // namespace

TEST_CASE("clean 2.23.1 project stops after the initial scan") {
    ScanReport r = run_scan(scenario("clean-2231"), {}, default_kb());
    CHECK(r.verdict == Verdict::NotVulnerable);
    CHECK(r.mode_reached == ScanMode::InitialOnly);
    CHECK(r.findings.empty());
    CHECK(r.files_scanned == 1); // just the pom
    REQUIRE(r.dependencies_seen.size() == 1);
    CHECK(r.dependencies_seen[0].resolved_version->raw == "2.23.1");
}

TEST_CASE("vulnerable 2.14.1 project triggers the deep scan and is flagged") {
    ScanReport r = run_scan(scenario("vuln-2141"), {}, default_kb());
    CHECK(r.verdict == Verdict::Vulnerable);
    CHECK(r.mode_reached == ScanMode::DeepScan);
    CHECK(finding_ids(r) ==
          std::set<std::string>{"CVE-2021-44228", "CVE-2021-45046", "CVE-2021-45105", "CVE-2021-44832"});

    const Finding* shell = find_finding(r, "CVE-2021-44228");
    REQUIRE(shell != nullptr);
    CHECK(shell->score_text() == "10.0");
    CHECK(shell->severity_band() == SeverityBand::Critical);
    CHECK(shell->confidence == Confidence::ConfirmedUsage); // JndiLookup imported in a source file
    REQUIRE(shell->evidence.size() >= 2);                   // version evidence + pattern evidence
    bool version_ev = false, pattern_ev = false;
    for (const auto& e : shell->evidence) {
        if (e.kind == EvidenceKind::DependencyVersion) {
            version_ev = true;
            CHECK(e.file == "pom.xml");
            CHECK(e.line > 0);
        }
        if (e.kind == EvidenceKind::PatternHit) pattern_ev = true;
    }
    CHECK(version_ev);
    CHECK(pattern_ev);

    // 2.14.1 is past the SMTP appender fix line; that CVE must not appear
    CHECK(find_finding(r, "CVE-2020-9488") == nullptr);

    // findings are ranked: score descending, id ascending
    for (std::size_t i = 1; i < r.findings.size(); ++i) {
        CHECK(r.findings[i - 1].score_tenths >= r.findings[i].score_tenths);
        if (r.findings[i - 1].score_tenths == r.findings[i].score_tenths)
            CHECK(r.findings[i - 1].cve_id < r.findings[i].cve_id);
    }
}

TEST_CASE("v1 project without JndiLookup is never flagged for Log4Shell") {
    ScanReport r = run_scan(scenario("v1-no-jndi"), {}, default_kb());
    CHECK(r.verdict == Verdict::Vulnerable);
    CHECK(r.mode_reached == ScanMode::DeepScan);
    CHECK(find_finding(r, "CVE-2021-44228") == nullptr);
    CHECK(find_finding(r, "CVE-2021-45046") == nullptr);

    // the v1 CVEs fire from version evidence alone, marked version-only
    const Finding* jms = find_finding(r, "CVE-2021-4104");
    REQUIRE(jms != nullptr);
    CHECK(jms->confidence == Confidence::VersionOnly);
    for (const auto& e : jms->evidence) CHECK(e.kind == EvidenceKind::DependencyVersion);
    CHECK(finding_ids(r) == std::set<std::string>{"CVE-2019-17571", "CVE-2021-4104", "CVE-2022-23302",
                                                  "CVE-2022-23305", "CVE-2022-23307"});
}

TEST_CASE("malformed pom falls through to the deep scan") {
    ScanReport r = run_scan(scenario("malformed-pom"), {}, default_kb());
    CHECK(r.mode_reached == ScanMode::DeepScan);
    CHECK(r.verdict == Verdict::NotVulnerable); // sources are clean
    REQUIRE_FALSE(r.warnings.empty());
    CHECK(r.warnings[0].find("pom.xml") != std::string::npos);
}

TEST_CASE("strict mode drops version-only findings for appender-gated v1 CVEs") {
    ScanConfig strict;
    strict.strict = true;

    // version evidence only: everything gated disappears, verdict flips
    ScanReport r1 = run_scan(scenario("v1-no-jndi"), strict, default_kb());
    CHECK(r1.findings.empty());
    CHECK(r1.verdict == Verdict::NotVulnerable);

    // confirmed usage still fires in strict mode
    TempDir dir;
    write_file(dir.path() / "pom.xml",
               "<project><dependencies><dependency>"
               "<groupId>log4j</groupId><artifactId>log4j</artifactId><version>1.2.17</version>"
               "</dependency></dependencies></project>");
    write_file(dir.path() / "src" / "Q.java", "import org.apache.log4j.net.JMSAppender;\n");
    ScanReport r2 = run_scan(dir.path(), strict, default_kb());
    CHECK(finding_ids(r2) == std::set<std::string>{"CVE-2021-4104"});
    const Finding* jms = find_finding(r2, "CVE-2021-4104");
    REQUIRE(jms != nullptr);
    CHECK(jms->confidence == Confidence::ConfirmedUsage);
    // version evidence is merged into the surviving finding
    bool has_version_evidence = false;
    for (const auto& e : jms->evidence)
        if (e.kind == EvidenceKind::DependencyVersion) has_version_evidence = true;
    CHECK(has_version_evidence);

    // non-gated v2 CVEs are unaffected by strict mode
    ScanReport r3 = run_scan(scenario("vuln-2170"), strict, default_kb());
    CHECK(finding_ids(r3) == std::set<std::string>{"CVE-2021-44832"});
}

TEST_CASE("pattern hits are narrowed by the detected version") {
    TempDir dir;
    write_file(dir.path() / "pom.xml",
               "<project><dependencies><dependency>"
               "<groupId>org.apache.logging.log4j</groupId><artifactId>log4j-core</artifactId>"
               "<version>2.15.0</version>"
               "</dependency></dependencies></project>");
    write_file(dir.path() / "notes.txt", "mentions org.apache.log4j.net.SocketServer from the v1 days\n");
    ScanReport r = run_scan(dir.path(), {}, default_kb());
    // 2.15.0 is not in CVE-2019-17571's v1-only range: the hit is suppressed
    CHECK(find_finding(r, "CVE-2019-17571") == nullptr);
    CHECK(finding_ids(r) == std::set<std::string>{"CVE-2021-45046", "CVE-2021-45105", "CVE-2021-44832"});
}

TEST_CASE("verdict is vulnerable exactly when findings exist") {
    for (const char* name : {"clean-2231", "vuln-2141", "v1-no-jndi", "malformed-pom", "vuln-2170"}) {
        INFO(name);
        ScanReport r = run_scan(scenario(name), {}, default_kb());
        CHECK((r.verdict == Verdict::Vulnerable) == !r.findings.empty());
    }
}

TEST_CASE("every finding is KB-backed and version evidence stays in range") {
    const Kb& kb = default_kb();
    for (const char* name : {"vuln-2141", "v1-no-jndi", "vuln-2170"}) {
        INFO(name);
        ScanReport r = run_scan(scenario(name), {}, kb);
        std::vector<Log4jVersion> detected;
        for (const auto& d : r.dependencies_seen)
            if (d.is_log4j_artifact() && d.resolved_version) detected.push_back(*d.resolved_version);
        for (const auto& f : r.findings) {
            const CveRecord& rec = kb.record(f.cve_id); // throws if unknown
            CHECK(f.score_tenths == rec.score_tenths);
            for (const auto& e : f.evidence) {
                if (e.kind != EvidenceKind::DependencyVersion) continue;
                bool any_in_range = false;
                for (const auto& v : detected)
                    if (rec.affected && rec.affected->contains(v)) any_in_range = true;
                CHECK(any_in_range);
            }
        }
    }
}

TEST_CASE("run_scan is idempotent apart from timestamps") {
    ScanReport a = run_scan(scenario("vuln-2141"), {}, default_kb());
    ScanReport b = run_scan(scenario("vuln-2141"), {}, default_kb());
    a.started = b.started = "";
    a.finished = b.finished = "";

    REQUIRE(a.findings.size() == b.findings.size());
    for (std::size_t i = 0; i < a.findings.size(); ++i) {
        CHECK(a.findings[i].cve_id == b.findings[i].cve_id);
        REQUIRE(a.findings[i].evidence.size() == b.findings[i].evidence.size());
        for (std::size_t j = 0; j < a.findings[i].evidence.size(); ++j) {
            CHECK(a.findings[i].evidence[j].file == b.findings[i].evidence[j].file);
            CHECK(a.findings[i].evidence[j].line == b.findings[i].evidence[j].line);
            CHECK(a.findings[i].evidence[j].detail == b.findings[i].evidence[j].detail);
        }
    }
    CHECK(a.files_scanned == b.files_scanned);
    CHECK(a.warnings == b.warnings);
}

TEST_CASE("missing scan root is a hard error") {
    CHECK_THROWS_AS(run_scan("/nonexistent/path/xyz", {}, default_kb()), scan_error);
}

TEST_CASE("rank_findings sorts by score then id") {
    Finding a;
    a.cve_id = "CVE-2021-45105";
    a.score_tenths = 75;
    Finding b;
    b.cve_id = "CVE-2021-44228";
    b.score_tenths = 100;
    Finding c;
    c.cve_id = "CVE-2021-44832";
    c.score_tenths = 66;
    Finding d;
    d.cve_id = "CVE-2020-9488";
    d.score_tenths = 75;

    auto ranked = rank_findings({a, b, c, d});
    REQUIRE(ranked.size() == 4);
    CHECK(ranked[0].cve_id == "CVE-2021-44228");
    CHECK(ranked[1].cve_id == "CVE-2020-9488");   // 7.5 tie: id ascending
    CHECK(ranked[2].cve_id == "CVE-2021-45105");
    CHECK(ranked[3].cve_id == "CVE-2021-44832");

    CHECK(rank_findings({}).empty());
}

TEST_CASE("merge_evidence folds duplicate CVEs and deduplicates evidence") {
    Finding version_side;
    version_side.cve_id = "CVE-2021-44228";
    version_side.score_tenths = 100;
    version_side.confidence = Confidence::VersionOnly;
    version_side.evidence = {{"pom.xml", 14, EvidenceKind::DependencyVersion, "dependency log4j-core 2.14.1"}};

    Finding pattern_side = version_side;
    pattern_side.confidence = Confidence::ConfirmedUsage;
    pattern_side.evidence = {{"src/A.java", 3, EvidenceKind::PatternHit, "JndiLookup"}};

    auto merged = merge_evidence({version_side}, {pattern_side});
    REQUIRE(merged.size() == 1);
    CHECK(merged[0].evidence.size() == 2);
    CHECK(merged[0].confidence == Confidence::ConfirmedUsage);

    Finding other;
    other.cve_id = "CVE-2021-4104";
    other.score_tenths = 75;
    other.evidence = {{"pom.xml", 9, EvidenceKind::DependencyVersion, "dependency log4j 1.2.16"}};
    auto disjoint = merge_evidence({version_side}, {other});
    CHECK(disjoint.size() == 2);

    auto twice = merge_evidence({version_side}, {version_side});
    REQUIRE(twice.size() == 1);
    CHECK(twice[0].evidence.size() == 1); // identical (file, line, kind) collapses

    // evidence sorted by (file, line, kind)
    for (std::size_t i = 1; i < merged[0].evidence.size(); ++i)
        CHECK(merged[0].evidence[i - 1].file <= merged[0].evidence[i].file);
}

TEST_CASE("misconfiguration finding appears when appenders are configured without a version") {
    TempDir dir;
    write_file(dir.path() / "conf" / "log4j.properties",
               "log4j.appender.jms=org.apache.log4j.net.JMSAppender\n");
    ScanReport r = run_scan(dir.path(), {}, default_kb()); // no pom at all
    CHECK(r.mode_reached == ScanMode::DeepScan);
    CHECK(finding_ids(r) == std::set<std::string>{"CVE-2021-4104", "Potential misconfiguration"});
    const Finding* mis = find_finding(r, "Potential misconfiguration");
    REQUIRE(mis != nullptr);
    CHECK(mis->score_text() == "5.0");
    CHECK(mis->severity_band() == SeverityBand::Medium);
    REQUIRE_FALSE(mis->evidence.empty());
    CHECK(mis->evidence[0].kind == EvidenceKind::ConfigReference);
}
