#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

#include "pit2crack/pit2crack.hpp"

#include "oracles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

CliResult run_cli(const std::string& args, const std::string& env = "") {
    static int counter = 0;
    const fs::path dir = fs::temp_directory_path() / ("p2c_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const fs::path out = dir / ("out" + std::to_string(counter));
    const fs::path err = dir / ("err" + std::to_string(counter));
    ++counter;
    const std::string cmd = env + (env.empty() ? "" : " ") + std::string(PIT2CRACK_BIN) + " " +
                            args + " >" + out.string() + " 2>" + err.string();
    const int rc = std::system(cmd.c_str());
    CliResult r;
    if (WIFEXITED(rc)) r.exit_code = WEXITSTATUS(rc);
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir =
        fs::temp_directory_path() / ("p2c_test_" + std::to_string(::getpid()) + "_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

const std::string kSampleHistory = std::string(PIT2CRACK_DATA_DIR) + "/uniaxial_q235.csv";
const std::string kSampleConfig = std::string(PIT2CRACK_DATA_DIR) + "/pit_config_2level.json";

} // namespace

TEST_CASE("cli generate produces the documented files, reproducibly") {
    const auto dir = fresh_dir("gen");
    const std::string out1 = (dir / "a").string();
    const std::string out2 = (dir / "b").string();

    const auto r1 = run_cli("generate --config " + kSampleConfig + " --out " + out1);
    INFO(r1.err);
    REQUIRE(r1.exit_code == 0);
    for (const char* name : {"heightfield.csv", "heightfield.grid", "caps.csv", "metrics.json",
                             "manifest.json"})
        REQUIRE(fs::exists(fs::path(out1) / name));

    const auto r2 = run_cli("generate --config " + kSampleConfig + " --out " + out2);
    REQUIRE(r2.exit_code == 0);
    CHECK(slurp(fs::path(out1) / "heightfield.csv") == slurp(fs::path(out2) / "heightfield.csv"));
    CHECK(slurp(fs::path(out1) / "heightfield.grid") == slurp(fs::path(out2) / "heightfield.grid"));
    CHECK(slurp(fs::path(out1) / "caps.csv") == slurp(fs::path(out2) / "caps.csv"));

    // manifests agree except for the timing fields
    auto m1 = json::parse(slurp(fs::path(out1) / "manifest.json"));
    auto m2 = json::parse(slurp(fs::path(out2) / "manifest.json"));
    CHECK(m1["outputs"] != json::array());
    m1.erase("wall_time_s");
    m2.erase("wall_time_s");
    m1.erase("timestamp_utc");
    m2.erase("timestamp_utc");
    // output paths differ (different --out); compare digests only
    std::vector<std::string> d1, d2;
    for (auto& o : m1["outputs"]) d1.push_back(o["fnv1a64"]);
    for (auto& o : m2["outputs"]) d2.push_back(o["fnv1a64"]);
    CHECK(d1 == d2);

    // the manifest digests match the files on disk
    for (auto& o : m1["outputs"])
        CHECK(o["fnv1a64"].get<std::string>() == p2c::digest_file(o["path"].get<std::string>()));

    // a seed override changes the surface
    const std::string out3 = (dir / "c").string();
    const auto r3 =
        run_cli("generate --config " + kSampleConfig + " --seed 777 --out " + out3);
    REQUIRE(r3.exit_code == 0);
    CHECK(slurp(fs::path(out1) / "heightfield.csv") != slurp(fs::path(out3) / "heightfield.csv"));
}

TEST_CASE("cli generate rejects a bad config with exit 2 and the json path") {
    const auto dir = fresh_dir("genbad");
    const fs::path cfg = dir / "bad.json";
    spit(cfg, R"({"patch_size":[4000,4000],"grid":[101,101],"seed":1,
                  "levels":[{"pit_count":1,
                             "radius_dist":{"type":"uniform","min":-5,"max":10}}]})");
    const auto r = run_cli("generate --config " + cfg.string() + " --out " + (dir / "o").string());
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("levels[0].radius_dist") != std::string::npos);
}

TEST_CASE("cli seed falls back to the environment variable") {
    const auto dir = fresh_dir("genenv");
    const fs::path cfg = dir / "noseed.json";
    spit(cfg, R"({"patch_size":[2000,2000],"grid":[51,51],
                  "levels":[{"pit_count":1,
                             "radius_dist":{"type":"fixed","value":400.0}}]})");
    const auto no_seed =
        run_cli("generate --config " + cfg.string() + " --out " + (dir / "a").string());
    CHECK(no_seed.exit_code == 2);
    CHECK(no_seed.err.find("seed") != std::string::npos);

    const auto with_env = run_cli(
        "generate --config " + cfg.string() + " --out " + (dir / "b").string(),
        "PIT2CRACK_SEED=31337");
    REQUIRE(with_env.exit_code == 0);
    const auto man = json::parse(slurp(dir / "b" / "manifest.json"));
    CHECK(man["seeds"][0].get<std::uint64_t>() == 31337u);
}

TEST_CASE("cli idealize mirrors the ellipsoid field") {
    const auto dir = fresh_dir("ide");
    const auto r = run_cli("idealize --depth 500 --width 2000 --out " + (dir / "o").string());
    INFO(r.err);
    REQUIRE(r.exit_code == 0);
    const auto field = p2c::heightfield_from_binary(
        p2c::read_file_bytes((dir / "o" / "heightfield.grid").string()));
    CHECK(field.at(100, 100) == Catch::Approx(500.0));
    CHECK(field.at(150, 100) == 0.0);
    const auto metrics = json::parse(slurp(dir / "o" / "metrics.json"));
    CHECK(std::abs(metrics["w"].get<double>() - 2000.0) <= 20.0);

    const auto bad = run_cli("idealize --depth 500 --width 9000 --out " + (dir / "x").string());
    CHECK(bad.exit_code == 2);
}

TEST_CASE("cli mesh writes valid stl in both flavors") {
    const auto dir = fresh_dir("mesh");
    REQUIRE(run_cli("idealize --depth 200 --width 900 --nx 41 --ny 41 --dx 25 --dy 25 --out " +
                    (dir / "f").string())
                .exit_code == 0);
    const std::string grid = (dir / "f" / "heightfield.grid").string();

    const auto rb = run_cli("mesh --field " + grid + " --slab 500 --out " + (dir / "m").string());
    INFO(rb.err);
    REQUIRE(rb.exit_code == 0);
    const auto bytes = p2c::read_file_bytes((dir / "m" / "mesh.stl").string());
    const auto tris = oracle::read_stl_binary(bytes);
    CHECK(bytes.size() == 84 + 50 * tris.size());
    CHECK(!tris.empty());

    const auto ra = run_cli("mesh --field " + grid + " --stl ascii --out " +
                            (dir / "a").string());
    REQUIRE(ra.exit_code == 0);
    const auto text = slurp(dir / "a" / "mesh.stl");
    CHECK(text.rfind("solid", 0) == 0);
    CHECK(oracle::read_stl_ascii(text).size() == 2u * 40 * 40);

    // csv input requires the grid spacing flags; defaults fit this field
    const auto rc = run_cli("mesh --field " + (dir / "f" / "heightfield.csv").string() +
                            " --dx 25 --dy 25 --out " + (dir / "c").string());
    REQUIRE(rc.exit_code == 0);

    const auto thin = run_cli("mesh --field " + grid + " --slab 100 --out " +
                              (dir / "t").string());
    CHECK(thin.exit_code == 2); // thinner than the pit depth
}

TEST_CASE("cli life matches the library result on the packaged sample") {
    const auto dir = fresh_dir("life");
    const auto r = run_cli("life --history " + kSampleHistory + " --material Q235 --out " +
                           (dir / "o").string());
    INFO(r.err);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("worst location uniaxial") != std::string::npos);

    // library-level reference, bit for bit through the csv
    const auto m = p2c::q235();
    auto histories = p2c::parse_history_csv(slurp(kSampleHistory));
    const auto field = p2c::life_field(histories, m, {});
    const std::string expected_csv = p2c::life_results_csv(field);
    CHECK(slurp(dir / "o" / "results.csv") == expected_csv);

    const auto report = json::parse(slurp(dir / "o" / "report.json"));
    CHECK(report["worst"]["location_id"] == "uniaxial");
    CHECK(report["worst"]["nf"].get<double>() ==
          field.results[field.worst_index].nf);
    CHECK(!report["worst"]["cycle_table"].empty());
    CHECK(report["settings"]["ksur"].get<double>() == 1.0);
    CHECK(report["material"]["name"] == "Q235");
}

TEST_CASE("cli life rejects malformed csv with the row number") {
    const auto dir = fresh_dir("lifebad");
    const fs::path csv = dir / "bad.csv";
    spit(csv,
         "location_id,step,exx,eyy,ezz,gxy,gxz,gyz,sxx,syy,szz,txy,txz,tyz\n"
         "e1,0,1e-3,0,0,0,0,0,0,0,0,0,0,0\n"
         "e1,1,zzz,0,0,0,0,0,0,0,0,0,0,0\n");
    const auto r = run_cli("life --history " + csv.string() + " --out " + (dir / "o").string());
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("row 3") != std::string::npos);
}

TEST_CASE("cli life runs at 5 and 10 degree plane steps with consistent lives") {
    const auto dir = fresh_dir("lifestep");
    const auto r10 = run_cli("life --history " + kSampleHistory + " --plane-step 10 --out " +
                             (dir / "s10").string());
    const auto r5 = run_cli("life --history " + kSampleHistory +
                            " --plane-step 5 --psi-step 5 --out " + (dir / "s5").string());
    REQUIRE(r10.exit_code == 0);
    REQUIRE(r5.exit_code == 0);
    const auto j10 = json::parse(slurp(dir / "s10" / "report.json"));
    const auto j5 = json::parse(slurp(dir / "s5" / "report.json"));
    const double nf10 = j10["worst"]["nf"].get<double>();
    const double nf5 = j5["worst"]["nf"].get<double>();
    // the finer grid resolves the true maximum-shear plane; both lives agree
    // within the plane-grid resolution tolerance
    CHECK(std::abs(nf5 - nf10) / nf5 < 0.20);
}

TEST_CASE("cli validate-intact gates on the published band") {
    const auto good = run_cli("validate-intact");
    INFO(good.err);
    CHECK(good.exit_code == 0);
    CHECK(good.out.find("PASS") != std::string::npos);

    const auto raw = run_cli("validate-intact --ksur 1.0");
    CHECK(raw.exit_code == 1);
    CHECK(raw.out.find("FAIL") != std::string::npos);
    // the uncorrected life sits an order of magnitude above the band
    const auto pos = raw.out.find("Nf");
    REQUIRE(pos != std::string::npos);
    const double nf = std::stod(raw.out.substr(raw.out.find('=', pos) + 1));
    CHECK(nf >= 1e7);
    CHECK(nf < 1e8);
}

TEST_CASE("cli batch writes summary statistics") {
    const auto dir = fresh_dir("batch");
    const fs::path cfg = dir / "cfg.json";
    spit(cfg, R"({"patch_size":[2000,2000],"grid":[81,81],"seed":5,
                  "levels":[{"pit_count":1,
                             "radius_dist":{"type":"uniform","min":300,"max":600}}]})");
    const auto r = run_cli("batch --config " + cfg.string() + " --samples 6 --jobs 2 --out " +
                           (dir / "o").string());
    INFO(r.err);
    REQUIRE(r.exit_code == 0);
    const auto sum = json::parse(slurp(dir / "o" / "summary.json"));
    CHECK(sum["n_samples"] == 6);
    CHECK(sum["metrics"]["d"]["mean"].get<double>() > 0.0);
    CHECK(sum["metrics"]["d"]["min"].get<double>() <=
          sum["metrics"]["d"]["max"].get<double>());
    const auto samples = slurp(dir / "o" / "samples.csv");
    CHECK(samples.rfind("sample,seed,d,w,l,ra,footprint_area\n", 0) == 0);
    CHECK(std::count(samples.begin(), samples.end(), '\n') == 7);
}
