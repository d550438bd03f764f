#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "log4shield/version.hpp"

using namespace log4shield;

namespace {

Log4jVersion v(const char* s) {
    auto parsed = parse_version(s);
    REQUIRE(parsed.has_value());
    return *parsed;
}

// Brute-force classifier written straight from the prose rules, independent
// of the library path: v1 is any "1." version; v2 is vulnerable below 2.17.1
// unless it is one of the four security-patch releases named in either list.
VulnClass oracle_classify(const Log4jVersion& ver) {
    if (ver.major == 1) return VulnClass::V1Vulnerable;
    if (ver.major != 2) return VulnClass::NotVulnerable;
    const char* patched[] = {"2.3.1", "2.3.2", "2.12.3", "2.12.4"};
    for (const char* p : patched)
        if (ver == v(p)) return VulnClass::NotVulnerable;
    if (ver < v("2.17.1")) return VulnClass::V2Vulnerable;
    return VulnClass::NotVulnerable;
}

Log4jVersion random_version(std::mt19937& rng) {
    std::uniform_int_distribution<int> num(0, 23);
    std::uniform_int_distribution<int> qsel(0, 5);
    std::uniform_int_distribution<int> qnum(0, 12);
    Log4jVersion out;
    out.major = num(rng);
    out.minor = num(rng);
    out.patch = num(rng);
    out.qualifier = static_cast<Qualifier>(qsel(rng));
    out.qualifier_num = out.qualifier == Qualifier::None ? 0 : qnum(rng);
    out.raw = out.canonical();
    return out;
}

} // namespace

TEST_CASE("parse_version decomposes plain versions") {
    auto p = v("1.2.17");
    CHECK(p.major == 1);
    CHECK(p.minor == 2);
    CHECK(p.patch == 17);
    CHECK(p.qualifier == Qualifier::None);

    auto q = v("2.23.1");
    CHECK(q.major == 2);
    CHECK(q.minor == 23);
    CHECK(q.patch == 1);

    auto two_part = v("2.0");
    CHECK(two_part.patch == 0);
}

TEST_CASE("parse_version handles pre-release qualifiers") {
    auto beta = v("2.0-beta9");
    CHECK(beta.major == 2);
    CHECK(beta.minor == 0);
    CHECK(beta.patch == 0);
    CHECK(beta.qualifier == Qualifier::Beta);
    CHECK(beta.qualifier_num == 9);
    CHECK(beta < v("2.0")); // beta strictly before the release

    CHECK(v("2.0-rc1").qualifier == Qualifier::Rc);
    CHECK(v("2.0-alpha2") < v("2.0-beta1"));
    CHECK(v("2.0-beta9") < v("2.0-beta10")); // numeric suffix, not lexicographic
    CHECK(v("2.0-beta9") < v("2.0-rc1"));
    CHECK(v("1.0-SNAPSHOT") < v("1.0"));
    CHECK(v("2.0-beta-9") == v("2.0-beta9"));
}

TEST_CASE("parse_version rejects what it cannot order") {
    const char* bad[] = {"",           "abc",     "[2.0,2.15)", "${log4j.version}", "2.x",
                         "1.2.3.4",    "2.0-",    "2.0-exotic7", "2..1",            "-1.2",
                         "2.0-beta9x", "LATEST"};
    for (const char* s : bad) {
        INFO("input: '" << s << "'");
        CHECK_FALSE(parse_version(s).has_value());
    }
}

TEST_CASE("parse/canonical round-trips and keeps ordering") {
    std::mt19937 rng(20240811);
    for (int i = 0; i < 500; ++i) {
        Log4jVersion a = random_version(rng);
        auto back = parse_version(a.canonical());
        REQUIRE(back.has_value());
        CHECK(*back == a);
        CHECK(back->canonical() == a.canonical());
    }
}

TEST_CASE("version ordering is a total order") {
    std::mt19937 rng(7);
    for (int i = 0; i < 1000; ++i) {
        Log4jVersion a = random_version(rng);
        Log4jVersion b = random_version(rng);
        Log4jVersion c = random_version(rng);

        int holds = (a < b ? 1 : 0) + (a == b ? 1 : 0) + (b < a ? 1 : 0);
        CHECK(holds == 1); // exactly one of <, ==, >

        if (a < b && b < c) CHECK(a < c);
        if (a == b && b == c) CHECK(a == c);
        CHECK_FALSE(a < a);
    }
}

TEST_CASE("any qualifier sorts before the bare triple") {
    std::mt19937 rng(99);
    for (int i = 0; i < 300; ++i) {
        Log4jVersion a = random_version(rng);
        if (a.qualifier == Qualifier::None) continue;
        Log4jVersion bare = a;
        bare.qualifier = Qualifier::None;
        bare.qualifier_num = 0;
        CHECK(a < bare);
    }
}

TEST_CASE("classify_version matches the vulnerable-range rules") {
    CHECK(classify_version(v("1.2.17")) == VulnClass::V1Vulnerable);
    CHECK(classify_version(v("1.2.16")) == VulnClass::V1Vulnerable);
    CHECK(classify_version(v("2.12.4")) == VulnClass::NotVulnerable); // security patch (Java 7)
    CHECK(classify_version(v("2.3.2")) == VulnClass::NotVulnerable);  // security patch (Java 6)
    CHECK(classify_version(v("2.14.1")) == VulnClass::V2Vulnerable);
    CHECK(classify_version(v("2.23.1")) == VulnClass::NotVulnerable);
    CHECK(classify_version(v("2.0-beta9")) == VulnClass::V2Vulnerable);
    CHECK(classify_version(v("2.17.0")) == VulnClass::V2Vulnerable);
    CHECK(classify_version(v("2.17.1")) == VulnClass::NotVulnerable);
    CHECK(classify_version(v("2.17.2")) == VulnClass::NotVulnerable);
}

TEST_CASE("classify_version is exhaustive and inert outside major 1 and 2") {
    std::mt19937 rng(13);
    for (int i = 0; i < 500; ++i) {
        Log4jVersion a = random_version(rng);
        VulnClass c = classify_version(a);
        CHECK((c == VulnClass::V1Vulnerable || c == VulnClass::V2Vulnerable || c == VulnClass::NotVulnerable));
        if (a.major != 1 && a.major != 2) CHECK(c == VulnClass::NotVulnerable);
        CHECK(classify_version(a) == c); // deterministic
    }
}

TEST_CASE("security-patch exclusions stay clean despite sitting in the span") {
    for (const char* s : {"2.3.1", "2.3.2", "2.12.3", "2.12.4"}) {
        INFO("version: " << s);
        Log4jVersion ver = v(s);
        CHECK(v("2.0") < ver);
        CHECK(ver < v("2.17.1")); // inside the numeric span...
        CHECK(classify_version(ver) == VulnClass::NotVulnerable); // ...yet not flagged
    }
}

TEST_CASE("classification agrees with the brute-force oracle over the release list") {
    // Real Log4j release strings, both generations, plus the qualifiers.
    const char* releases[] = {
        "1.0.4", "1.1.3", "1.2", "1.2.4", "1.2.5", "1.2.6", "1.2.7", "1.2.8", "1.2.9", "1.2.11", "1.2.12",
        "1.2.13", "1.2.14", "1.2.15", "1.2.16", "1.2.17",
        "2.0-alpha1", "2.0-alpha2", "2.0-beta1", "2.0-beta2", "2.0-beta3", "2.0-beta4", "2.0-beta5", "2.0-beta6",
        "2.0-beta7", "2.0-beta8", "2.0-beta9", "2.0-rc1", "2.0-rc2", "2.0", "2.0.1", "2.0.2",
        "2.1", "2.2", "2.3", "2.3.1", "2.3.2", "2.4", "2.4.1", "2.5", "2.6", "2.6.1", "2.6.2", "2.7", "2.8",
        "2.8.1", "2.8.2", "2.9.0", "2.9.1", "2.10.0", "2.11.0", "2.11.1", "2.11.2", "2.12.0", "2.12.1", "2.12.2",
        "2.12.3", "2.12.4", "2.13.0", "2.13.1", "2.13.2", "2.13.3", "2.14.0", "2.14.1", "2.15.0", "2.16.0",
        "2.17.0", "2.17.1", "2.17.2", "2.18.0", "2.19.0", "2.20.0", "2.21.0", "2.21.1", "2.22.0", "2.22.1",
        "2.23.0", "2.23.1",
    };
    for (const char* s : releases) {
        INFO("release: " << s);
        Log4jVersion ver = v(s);
        CHECK(classify_version(ver) == oracle_classify(ver));
    }
}

TEST_CASE("version_in_range honors bounds and exclusions") {
    VersionRange r1{v("2.0"), v("2.17.0"), {v("2.3.2"), v("2.12.4")}};
    CHECK_FALSE(version_in_range(v("2.3.2"), r1)); // excluded point

    VersionRange r2{v("2.0-beta9"), v("2.17.0"), {}};
    CHECK(version_in_range(v("2.17.0"), r2));       // inclusive high bound
    CHECK_FALSE(version_in_range(v("2.17.1"), r2)); // just past it
    CHECK(version_in_range(v("2.0-beta9"), r2));    // inclusive low bound
    CHECK_FALSE(version_in_range(v("2.0-beta8"), r2));
}
