#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

namespace fs = std::filesystem;

namespace {

std::string g_cli;  // path to the eakd binary, passed by ctest

struct RunOutput {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string read_file(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

RunOutput run_cli(const std::string& args, const fs::path& scratch) {
    const fs::path out_path = scratch / "stdout.txt";
    const fs::path err_path = scratch / "stderr.txt";
    const std::string cmd = g_cli + " " + args + " >" + out_path.string() + " 2>" + err_path.string();
    const int status = std::system(cmd.c_str());
    RunOutput r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_file(out_path);
    r.err = read_file(err_path);
    return r;
}

// extracts the "run dir: ..." line a command prints
std::string parse_run_dir(const std::string& out) {
    const std::string needle = "run dir: ";
    const std::size_t pos = out.find(needle);
    REQUIRE(pos != std::string::npos);
    const std::size_t end = out.find('\n', pos);
    return out.substr(pos + needle.size(), end - pos - needle.size());
}

struct Scratch {
    fs::path path;
    explicit Scratch(const std::string& tag) {
        path = fs::temp_directory_path() / ("eakd_cli_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~Scratch() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

const std::string kTinyData =
    " --classes 4 --dims 3 --samples-per-class 10 --seed 5";
const std::string kTinyTrain =
    " --epochs 2 --batch-size 8 --lr 0.05 --lr-decay-epochs '' --teacher-hidden 8 --student-hidden 4";

} // namespace

TEST_CASE("gen-data writes csvs and a manifest; reruns are byte-identical") {
    Scratch scratch("gen");
    const fs::path d1 = scratch.path / "d1";
    const fs::path d2 = scratch.path / "d2";
    const RunOutput a = run_cli("gen-data --out " + d1.string() + kTinyData, scratch.path);
    CHECK(a.exit_code == 0);
    CHECK(a.out.find("seed 5") != std::string::npos);
    CHECK(fs::exists(d1 / "train.csv"));
    CHECK(fs::exists(d1 / "val.csv"));
    CHECK(fs::exists(d1 / "manifest"));
    CHECK(fs::exists(d1 / "resolved_config"));
    CHECK(read_file(d1 / "manifest").find("seed = 5") != std::string::npos);

    const RunOutput b = run_cli("gen-data --out " + d2.string() + kTinyData, scratch.path);
    CHECK(b.exit_code == 0);
    CHECK(read_file(d1 / "train.csv") == read_file(d2 / "train.csv"));
    CHECK(read_file(d1 / "val.csv") == read_file(d2 / "val.csv"));
    CHECK(read_file(d1 / "manifest") == read_file(d2 / "manifest"));
}

TEST_CASE("gen-data rejects a degenerate class count with exit 2") {
    Scratch scratch("genbad");
    const RunOutput r = run_cli("gen-data --out " + (scratch.path / "d").string() +
                                " --classes 1 --dims 3 --samples-per-class 10", scratch.path);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("class count") != std::string::npos);
}

TEST_CASE("full teacher/distill/eval flow with documented artifacts and exit codes") {
    Scratch scratch("flow");
    const fs::path data_dir = scratch.path / "data";
    REQUIRE(run_cli("gen-data --out " + data_dir.string() + kTinyData, scratch.path).exit_code == 0);

    const RunOutput teach = run_cli("train-teacher --data " + data_dir.string() +
                                    " --out " + (scratch.path / "runs").string() + kTinyTrain,
                                    scratch.path);
    REQUIRE(teach.exit_code == 0);
    const fs::path teacher_dir = parse_run_dir(teach.out);
    CHECK(fs::exists(teacher_dir / "teacher.ckpt"));
    CHECK(fs::exists(teacher_dir / "metrics.csv"));
    CHECK(fs::exists(teacher_dir / "resolved_config"));
    const std::string teacher_ckpt = (teacher_dir / "teacher.ckpt").string();

    SUBCASE("distill runs differing only in weighting mode") {
        const std::string base_args = " --data " + data_dir.string() + " --teacher " + teacher_ckpt +
                                      " --out " + (scratch.path / "runs").string() + kTinyTrain;
        const RunOutput none = run_cli("distill --weighting-mode none" + base_args, scratch.path);
        const RunOutput ea = run_cli("distill --weighting-mode ea" + base_args, scratch.path);
        REQUIRE(none.exit_code == 0);
        REQUIRE(ea.exit_code == 0);
        const fs::path none_dir = parse_run_dir(none.out);
        const fs::path ea_dir = parse_run_dir(ea.out);
        CHECK(fs::exists(none_dir / "student.ckpt"));
        CHECK(fs::exists(none_dir / "quartile_shares.csv"));

        // resolved configs differ in exactly the weighting_mode line
        std::ifstream fa(none_dir / "resolved_config"), fb(ea_dir / "resolved_config");
        std::string la, lb;
        int diff_lines = 0;
        while (std::getline(fa, la) && std::getline(fb, lb)) {
            if (la != lb) {
                ++diff_lines;
                CHECK(la == "weighting_mode = none");
                CHECK(lb == "weighting_mode = ea");
            }
        }
        CHECK(diff_lines == 1);
    }

    SUBCASE("resolved_config reproduces a distill run byte for byte") {
        const std::string base_args = " --data " + data_dir.string() + " --teacher " + teacher_ckpt +
                                      " --out " + (scratch.path / "runs").string() + kTinyTrain;
        const RunOutput first = run_cli("distill" + base_args, scratch.path);
        REQUIRE(first.exit_code == 0);
        const fs::path first_dir = parse_run_dir(first.out);

        const RunOutput second = run_cli(
            "distill --config " + (first_dir / "resolved_config").string(), scratch.path);
        REQUIRE(second.exit_code == 0);
        const fs::path second_dir = parse_run_dir(second.out);
        CHECK(read_file(first_dir / "metrics.csv") == read_file(second_dir / "metrics.csv"));
        CHECK(read_file(first_dir / "student.ckpt") == read_file(second_dir / "student.ckpt"));
        CHECK(read_file(first_dir / "resolved_config") == read_file(second_dir / "resolved_config"));
    }

    SUBCASE("eval accepts the checkpoint and reports per-sample stats") {
        const RunOutput ev = run_cli("eval --checkpoint " + teacher_ckpt + " --data " + data_dir.string() +
                                     " --out " + (scratch.path / "runs").string(), scratch.path);
        REQUIRE(ev.exit_code == 0);
        const fs::path ev_dir = parse_run_dir(ev.out);
        const std::string csv = read_file(ev_dir / "eval.csv");
        CHECK(csv.rfind("sample,entropy,correct,predicted\n", 0) == 0);
    }

    SUBCASE("a missing checkpoint exits 3 and names the path") {
        const RunOutput r = run_cli("eval --checkpoint missing.ck --data " + data_dir.string() +
                                    " --out " + (scratch.path / "runs").string(), scratch.path);
        CHECK(r.exit_code == 3);
        CHECK(r.err.find("missing.ck") != std::string::npos);
    }

    SUBCASE("a foreign file as teacher checkpoint exits 3") {
        const RunOutput r = run_cli("distill --teacher " + (data_dir / "train.csv").string() +
                                    " --data " + data_dir.string() +
                                    " --out " + (scratch.path / "runs").string() + kTinyTrain,
                                    scratch.path);
        CHECK(r.exit_code == 3);
    }

    SUBCASE("ablate writes the grid csvs") {
        const RunOutput r = run_cli("ablate --study weighting --seeds 2 --data " + data_dir.string() +
                                    " --teacher " + teacher_ckpt +
                                    " --out " + (scratch.path / "runs").string() + kTinyTrain,
                                    scratch.path);
        REQUIRE(r.exit_code == 0);
        const fs::path dir = parse_run_dir(r.out);
        const std::string raw = read_file(dir / "weighting_raw.csv");
        CHECK(raw.rfind("axis_value,seed,final_val_acc\n", 0) == 0);
        // 6 modes x 2 seeds
        CHECK(std::count(raw.begin(), raw.end(), '\n') == 13);
        const std::string agg = read_file(dir / "weighting_aggregate.csv");
        CHECK(agg.rfind("axis_value,mean,std,n\n", 0) == 0);
    }
}

TEST_CASE("bad flag values and unknown config keys exit 2") {
    Scratch scratch("bad");
    const RunOutput r = run_cli("distill --weighting-mode sideways --data x --teacher y --out " +
                                (scratch.path / "runs").string(), scratch.path);
    CHECK(r.exit_code == 2);

    {
        std::ofstream f(scratch.path / "bad.cfg");
        f << "no_such_key = 1\n";
    }
    const RunOutput r2 = run_cli("distill --config " + (scratch.path / "bad.cfg").string(), scratch.path);
    CHECK(r2.exit_code == 2);
    CHECK(r2.err.find("no_such_key") != std::string::npos);

    const RunOutput r3 = run_cli("", scratch.path);
    CHECK(r3.exit_code != 0);

    const RunOutput help = run_cli("--help", scratch.path);
    CHECK(help.exit_code == 0);
}

int main(int argc, char** argv) {
    // first non-flag argument is the eakd binary path (supplied by ctest)
    std::vector<char*> pass{argv[0]};
    for (int i = 1; i < argc; ++i) {
        if (g_cli.empty() && argv[i][0] != '-') {
            g_cli = argv[i];
        } else {
            pass.push_back(argv[i]);
        }
    }
    if (g_cli.empty()) {
        std::fprintf(stderr, "usage: test_cli <path-to-eakd-binary> [doctest args]\n");
        return 1;
    }
    doctest::Context ctx;
    ctx.applyCommandLine(static_cast<int>(pass.size()), pass.data());
    return ctx.run();
}
