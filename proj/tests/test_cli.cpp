#include "foilforge/binio.hpp"
#include "support.hpp"

#include <cstdlib>
#include <doctest.h>
#include <filesystem>
#include <fmt/format.h>
#include <json.hpp>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string output;
};

// Scratch directory removed on scope exit.
struct Scratch {
    fs::path dir;
    explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("foilforge_cli_" + name)) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    std::string operator/(const std::string& leaf) const { return (dir / leaf).string(); }
};

Run cli(const std::string& args, const Scratch& scratch) {
    const auto log = scratch / "stdout.txt";
    const std::string cmd = fmt::format("\"{}\" {} > \"{}\" 2>&1", FOILFORGE_CLI, args, log);
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    const auto bytes = fs::exists(log) ? foilforge::binio::read_file(log) : std::vector<std::uint8_t>{};
    r.output.assign(bytes.begin(), bytes.end());
    return r;
}

// Copies every `stride`-th corpus file into <scratch>/airfoils.
std::string airfoil_dir(const Scratch& s, std::size_t stride) {
    const fs::path dir = s.dir / "airfoils";
    fs::create_directories(dir);
    const auto files = support::corpus_files();
    for (std::size_t i = 0; i < files.size(); i += stride) {
        fs::copy_file(files[i], dir / files[i].filename());
    }
    return dir.string();
}

nlohmann::json last_json_line(const std::string& output) {
    const auto end = output.find_last_not_of('\n');
    const auto start = output.rfind('\n', end);
    return nlohmann::json::parse(output.substr(start == std::string::npos ? 0 : start + 1, end - start));
}

bool same_file(const std::string& a, const std::string& b) {
    return foilforge::binio::read_file(a) == foilforge::binio::read_file(b);
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("gen twice gives byte-identical datasets") {
    Scratch s("gen");
    const auto airfoils = airfoil_dir(s, 20);
    for (const char* out : {"a.afds", "b.afds"}) {
        const auto r = cli(fmt::format("gen --airfoils \"{}\" --case c2a --aoa 0,5 --out \"{}\" --seed 1", airfoils, s / out), s);
        REQUIRE_MESSAGE(r.code == 0, r.output);
    }
    CHECK(same_file(s / "a.afds", s / "b.afds"));

    const auto info = cli(fmt::format("inspect \"{}\"", s / "a.afds"), s);
    REQUIRE(info.code == 0);
    const auto j = nlohmann::json::parse(info.output);
    CHECK(j["type"] == "dataset");
    CHECK(j["case"] == "c2a");
    CHECK(j["seed"] == 1);
    CHECK(j["samples"] == 20);
    CHECK(j["split"]["train"].get<int>() + j["split"]["test"].get<int>() == 20);
}

TEST_CASE("usage errors exit with code 2") {
    Scratch s("usage");
    const auto unknown = cli("gen --airfoils x --case c2a --out y --seed 1 --bogus", s);
    CHECK(unknown.code == 2);
    CHECK(unknown.output.find("--bogus") != std::string::npos);
    CHECK(unknown.output.find("--help") != std::string::npos);

    CHECK(cli("gen --airfoils x --case c2a --out y", s).code == 2); // --seed is mandatory
    CHECK(cli("train --case c2a --model rnn --data d --seed 1 --out m", s).code == 2);
    CHECK(cli("frobnicate", s).code == 2);
}

TEST_CASE("input problems exit with code 3") {
    Scratch s("input");
    CHECK(cli(fmt::format("inspect \"{}\"", s / "missing.afds"), s).code == 3);
    foilforge::binio::write_file_atomic(s / "junk.bin", std::string_view("JUNKJUNKJUNK"));
    const auto junk = cli(fmt::format("inspect \"{}\"", s / "junk.bin"), s);
    CHECK(junk.code == 3);
    CHECK(junk.output.find("BadMagic") != std::string::npos);
    CHECK(cli(fmt::format("gen --airfoils \"{}\" --case c2a --out \"{}\" --seed 1", s / "nowhere", s / "d.afds"), s).code ==
          3);
}

TEST_CASE("help documents every subcommand") {
    Scratch s("help");
    for (const char* sub : {"gen", "ingest", "raster", "train", "predict", "eval", "inspect", "naca", "solve"}) {
        const auto r = cli(fmt::format("{} --help", sub), s);
        CHECK_MESSAGE(r.code == 0, sub);
        CHECK_MESSAGE(r.output.find("OPTIONS") != std::string::npos, sub);
    }
    const auto train = cli("train --help", s);
    for (const char* flag : {"--case", "--model", "--data", "--epochs", "--batch", "--lr", "--seed", "--out", "--history"}) {
        CHECK_MESSAGE(train.output.find(flag) != std::string::npos, flag);
    }
}

TEST_CASE("train echoes the reference configuration and the pipeline runs end to end") {
    Scratch s("train");
    const auto airfoils = airfoil_dir(s, 40);
    auto r = cli(fmt::format("gen --airfoils \"{}\" --case c3 --aoa 0,6 --re 1e5,1e6 --out \"{}\" --seed 2", airfoils,
                             s / "d.afds"),
                 s);
    REQUIRE_MESSAGE(r.code == 0, r.output);

    r = cli(fmt::format("train --case c3 --model dnn --data \"{}\" --epochs 500 --batch 32 --lr 1e-4 --seed 7 --out \"{}\" "
                        "--history \"{}\"",
                        s / "d.afds", s / "m.afnc", s / "h.csv"),
            s);
    REQUIRE_MESSAGE(r.code == 0, r.output);
    const auto summary = last_json_line(r.output);
    CHECK(summary["config"]["epochs"] == 500);
    CHECK(summary["config"]["batch_size"] == 32);
    CHECK(summary["config"]["learning_rate"] == 1e-4);
    CHECK(summary["config"]["seed"] == 7);

    const auto info = nlohmann::json::parse(cli(fmt::format("inspect \"{}\"", s / "m.afnc"), s).output);
    CHECK(info["type"] == "checkpoint");
    CHECK(info["case"] == "c3");
    CHECK(info["input"][0] == 252);
    CHECK(info["output"][0] == 250);
    CHECK(info["epochs"] == 500);
    CHECK(info["batch_size"] == 32);
    CHECK(info["learning_rate"] == 1e-4);

    const auto history = foilforge::binio::read_file(s / "h.csv");
    CHECK(std::count(history.begin(), history.end(), '\n') == 501);

    CHECK(cli(fmt::format("train --case c2a --model dnn --data \"{}\" --epochs 1 --seed 1 --out \"{}\"", s / "d.afds",
                          s / "x.afnc"),
              s)
              .code == 3);

    r = cli(fmt::format("eval --model \"{}\" --data \"{}\" --out \"{}\" --plots \"{}\" --plot-count 2", s / "m.afnc",
                        s / "d.afds", s / "r.json", s / "plots"),
            s);
    REQUIRE_MESSAGE(r.code == 0, r.output);
    const auto report = nlohmann::json::parse(std::string(
        [&] { const auto b = foilforge::binio::read_file(s / "r.json"); return std::string(b.begin(), b.end()); }()));
    CHECK(report["case"] == "c3");
    CHECK(report["per_sample"].size() > 0);
    std::size_t svgs = 0;
    for (const auto& e : fs::directory_iterator(s.dir / "plots")) {
        svgs += e.path().extension() == ".svg" ? 1 : 0;
    }
    CHECK(svgs == 2);

    r = cli(fmt::format("predict --model \"{}\" --airfoil \"{}\" --aoa 4 --re 3e5 --out \"{}\" --svg \"{}\"", s / "m.afnc",
                        support::corpus_files().front().string(), s / "p.dat", s / "p.svg"),
            s);
    REQUIRE_MESSAGE(r.code == 0, r.output);
    const auto dat = foilforge::binio::read_file(s / "p.dat");
    CHECK(std::count(dat.begin(), dat.end(), '\n') == 126);
    CHECK(fs::exists(s / "p.svg"));
}

TEST_CASE("raster writes a 200 x 200 PGM") {
    Scratch s("raster");
    const auto airfoils = airfoil_dir(s, 60);
    REQUIRE(cli(fmt::format("gen --airfoils \"{}\" --case c2a --aoa 2 --out \"{}\" --seed 1", airfoils, s / "d.afds"), s)
                .code == 0);
    for (const char* content : {"cp", "outline"}) {
        const auto out = s / (std::string(content) + ".pgm");
        const auto r = cli(fmt::format("raster --data \"{}\" --index 1 --content {} --out \"{}\"", s / "d.afds", content, out), s);
        REQUIRE_MESSAGE(r.code == 0, r.output);
        CHECK(foilforge::binio::read_file(out).size() == 15 + 200 * 200);
    }
    CHECK(cli(fmt::format("raster --data \"{}\" --index 99 --out \"{}\"", s / "d.afds", s / "x.pgm"), s).code != 0);
}

TEST_CASE("solve and naca helpers") {
    Scratch s("solve");
    auto r = cli(fmt::format("naca --out \"{}\" --code 2412 --code 0012", s / "foils"), s);
    REQUIRE_MESSAGE(r.code == 0, r.output);
    CHECK(fs::exists(s.dir / "foils" / "naca2412.dat"));
    r = cli(fmt::format("solve --airfoil \"{}\" --aoa 4 --mach 0 --out \"{}\"", (s.dir / "foils" / "naca2412.dat").string(),
                        s / "cp.txt"),
            s);
    REQUIRE_MESSAGE(r.code == 0, r.output);
    const auto table = foilforge::binio::read_file(s / "cp.txt");
    CHECK(std::count(table.begin(), table.end(), '\n') >= 125);
    CHECK(cli(fmt::format("solve --airfoil \"{}\" --aoa 4 --mach 0.9", (s.dir / "foils" / "naca2412.dat").string()), s)
              .code != 0);
}

} // TEST_SUITE
