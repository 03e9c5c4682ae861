#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pwvcast/cli.hpp"
#include "pwvcast/errors.hpp"
#include "pwvcast/forecast.hpp"
#include "pwvcast/model_io.hpp"
#include "synthetic.hpp"

using namespace pwvcast;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("pwvcast_cli_" + std::to_string(counter_++))) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

std::string write_series(const TempDir& dir, const std::string& name, const TimeSeries& s) {
  const std::string path = dir / name;
  write_csv(s, fs::path(path));
  return path;
}

TimeSeries small_sinusoid() { return synth::sinusoid({.days = 1.5, .gaps = 3, .seed = 31}); }

}  // namespace

TEST_CASE("convert") {
  TempDir dir;
  const std::string in = dir / "zwd.csv";
  write_text(in, "timestamp,value\n2022-01-28T00:00:00Z,100\n2022-01-28T00:05:00Z,101\n2022-01-28T00:10:00Z,102\n");

  auto r = run_cli({"convert", "--input", in, "--lat", "0", "--height", "0", "--out", dir / "pwv.csv"});
  CHECK(r.code == 0);
  const std::string text = slurp(dir / "pwv.csv");
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  CHECK(text.find("2022-01-28T00:00:00Z,16.49") != std::string::npos);

  r = run_cli({"convert", "--input", in, "--lat", "0", "--out", dir / "x.csv"});
  CHECK(r.code == 1);
  CHECK(r.err.find("--height") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "x.csv"));

  // NTUS latitude: CLI output equals the library conversion.
  r = run_cli({"convert", "--input", in, "--lat", "1.30", "--height", "15", "--out", dir / "ntus.csv"});
  REQUIRE(r.code == 0);
  std::ifstream produced(dir / "ntus.csv");
  const TimeSeries cli_series = ingest_csv(produced, SeriesKind::kPwv);
  const TimeSeries lib_series = ingest_csv(fs::path(in), SeriesKind::kZwd, StationMeta(1.30, 15));
  CHECK(cli_series == lib_series);

  CHECK(run_cli({"convert", "--bogus"}).code == 1);
  CHECK(run_cli({}).code == 1);
  CHECK(run_cli({"--help"}).code == 0);
  CHECK(run_cli({"train", "--help"}).code == 0);
}

TEST_CASE("train: determinism, bias flag and loss history") {
  TempDir dir;
  const std::string in = write_series(dir, "pwv.csv", small_sinusoid());
  const std::vector<std::string> base{"train", "--input", in, "--epochs", "2", "--seed", "7", "--arch", "4"};
  auto with = [&base](std::vector<std::string> extra) {
    std::vector<std::string> a = base;
    a.insert(a.end(), extra.begin(), extra.end());
    return a;
  };

  REQUIRE(run_cli(with({"--out", dir / "a.model"})).code == 0);
  REQUIRE(run_cli(with({"--out", dir / "b.model"})).code == 0);
  CHECK(slurp(dir / "a.model") == slurp(dir / "b.model"));
  CHECK(slurp(dir / "a.model.loss.csv") == slurp(dir / "b.model.loss.csv"));

  const std::string loss = slurp(dir / "a.model.loss.csv");
  CHECK(loss.rfind("epoch,loss\n", 0) == 0);
  CHECK(std::count(loss.begin(), loss.end(), '\n') == 3);

  REQUIRE(run_cli(with({"--out", dir / "c.model", "--bias", "-0.62", "--loss-out", dir / "c.csv"})).code == 0);
  CHECK(fs::exists(dir / "c.csv"));
  const LstmModel plain = load_model(dir / "a.model");
  const LstmModel biased = load_model(dir / "c.model");
  CHECK(bit_identical(biased, apply_bias_correction(plain, -0.62)));
  CHECK(biased.params.head.b - plain.params.head.b == doctest::Approx(-0.62).epsilon(1e-14));

  REQUIRE(run_cli(with({"--out", dir / "d.model", "--estimate-bias"})).code == 0);
  CHECK(run_cli(with({"--out", dir / "e.model", "--estimate-bias", "--bias", "1"})).code == 1);
}

TEST_CASE("train failures leave no partial outputs") {
  TempDir dir;
  const std::string in = write_series(dir, "short.csv", synth::constant(30, 20.0));
  const auto r = run_cli({"train", "--input", in, "--epochs", "1", "--out", dir / "m.model"});
  CHECK(r.code == 1);
  CHECK_FALSE(fs::exists(dir / "m.model"));
  CHECK_FALSE(fs::exists(dir / "m.model.loss.csv"));
  CHECK(run_cli({"train", "--input", dir / "missing.csv", "--out", dir / "m.model"}).code == 1);
  CHECK(run_cli({"train", "--input", in, "--epochs", "zero", "--out", dir / "m.model"}).code == 1);
}

TEST_CASE("evaluate matches the library sweep") {
  TempDir dir;
  const TimeSeries series = small_sinusoid();
  const std::string in = write_series(dir, "pwv.csv", series);
  REQUIRE(run_cli({"train", "--input", in, "--epochs", "1", "--arch", "4", "--normalize", "--out", dir / "m"}).code == 0);
  const auto r = run_cli({"evaluate", "--input", in, "--model", dir / "m", "--out", dir / "report.csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("RMSE (mm)") != std::string::npos);
  CHECK(r.out.find(" 15 min") != std::string::npos);
  CHECK(r.out.find(" 20 min") == std::string::npos);

  const LstmModel model = load_model(dir / "m");
  const SplitSet split = chrono_split(make_windows(series), 0.8);
  std::ostringstream expected;
  write_report(lead_time_sweep(model, split.test, series, 12), expected);
  CHECK(slurp(dir / "report.csv") == expected.str());

  CHECK(run_cli({"evaluate", "--input", in, "--out", dir / "r2.csv"}).code == 1);  // no --model
  write_text(dir / "broken", "PWVLSTM 9\n");
  CHECK(run_cli({"evaluate", "--input", in, "--model", dir / "broken", "--out", dir / "r3.csv"}).code == 1);
}

TEST_CASE("evaluate: perfect forecaster and constant series") {
  TempDir dir;
  const TimeSeries series = small_sinusoid();
  const std::string in = write_series(dir, "pwv.csv", series);
  cli::RunConfig cfg = cli::resolve_config("evaluate", {}, {{"input", in}, {"out", dir / "p.csv"}});
  std::ostringstream out, err;
  const LeadTimeReport perfect = cli::evaluate_with(
      cfg,
      [&series](const Window& w, std::size_t k) {
        const std::size_t j = *series.index_of(w.label_epoch_s);
        std::vector<double> v;
        for (std::size_t i = 0; i < k; ++i) v.push_back(*series[j + i]);
        return v;
      },
      out, err);
  for (const auto& row : perfect.rows) CHECK(row.model_rmse_mm == 0.0);

  const std::string flat = write_series(dir, "flat.csv", synth::constant(300, 41.0));
  REQUIRE(run_cli({"train", "--input", flat, "--epochs", "1", "--arch", "3", "--out", dir / "m"}).code == 0);
  REQUIRE(run_cli({"evaluate", "--input", flat, "--model", dir / "m", "--out", dir / "flat_report.csv"}).code == 0);
  std::ifstream report_in(dir / "flat_report.csv");
  const LeadTimeReport report = read_report(report_in);
  REQUIRE_FALSE(report.rows.empty());
  for (const auto& row : report.rows) {
    CHECK(row.naive_rmse_mm == 0.0);
    CHECK(row.average_rmse_mm == 0.0);
  }
}

TEST_CASE("forecast") {
  TempDir dir;
  const TimeSeries series = synth::sinusoid({.days = 1.5, .gaps = 0, .seed = 31});
  const std::string in = write_series(dir, "pwv.csv", series);
  REQUIRE(run_cli({"train", "--input", in, "--epochs", "1", "--arch", "4", "--out", dir / "m"}).code == 0);
  const LstmModel model = load_model(dir / "m");
  std::vector<double> window;
  for (std::size_t i = series.size() - 48; i < series.size(); ++i) window.push_back(*series[i]);

  auto r = run_cli({"forecast", "--input", in, "--model", dir / "m"});
  REQUIRE(r.code == 0);
  const std::int64_t next = series.epoch_at(series.size() - 1) + 300;
  CHECK(r.out == "timestamp,value\n" + format_iso8601(next) + "," + format_double(predict_one(model, window)) + "\n");

  r = run_cli({"forecast", "--input", in, "--model", dir / "m", "--steps", "12", "--out", dir / "f.csv"});
  REQUIRE(r.code == 0);
  std::istringstream rows(r.out);
  const TimeSeries future = ingest_csv(rows, SeriesKind::kPwv);
  const auto expected = predict_iterative(model, window, 12);
  REQUIRE(future.size() == 12);
  CHECK(future.start_epoch_s() == next);
  for (std::size_t k = 0; k < 12; ++k) CHECK(*future[k] == expected[k]);
  CHECK(slurp(dir / "f.csv") == r.out);

  LstmModel flat = init_model(std::vector<std::size_t>{3}, 1);
  flat.params = flat.params.zeros_like();
  flat.params.head.b = 17.25;
  save_model(flat, dir / "flat");
  r = run_cli({"forecast", "--input", in, "--model", dir / "flat", "--steps", "4"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find(",17.25\n") != std::string::npos);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 5);

  std::vector<std::optional<double>> gappy(60, 30.0);
  gappy[40].reset();
  const std::string short_in = write_series(dir, "gappy.csv", TimeSeries(synth::kStartEpoch, gappy));
  r = run_cli({"forecast", "--input", short_in, "--model", dir / "m"});
  CHECK(r.code == 1);
  CHECK(r.err.find("only 19 gap-free samples") != std::string::npos);
}

TEST_CASE("gradcheck exit codes") {
  auto r = run_cli({"gradcheck"});
  CHECK(r.code == 0);
  CHECK(r.out.find("passed") != std::string::npos);
  CHECK(run_cli({"gradcheck", "--seed", "3", "--hidden", "5"}).code == 0);
  r = run_cli({"gradcheck", "--corrupt"});
  CHECK(r.code == 2);
  CHECK(r.out.find("FAILED") != std::string::npos);
  CHECK(run_cli({"gradcheck", "--no-such-flag"}).code == 1);
}

TEST_CASE("config resolution: defaults < file < flags, and the dump reloads") {
  TempDir dir;
  write_text(dir / "run.cfg", "# training run\nepochs = 5\narch = 16,8   # two layers\nnormalize = true\nseed = 9\n");
  auto r = run_cli({"train", "--config", dir / "run.cfg", "--seed", "11", "--print-config"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("epochs = 5\n") != std::string::npos);
  CHECK(r.out.find("arch = 16,8\n") != std::string::npos);
  CHECK(r.out.find("seed = 11\n") != std::string::npos);
  CHECK(r.out.find("batch = 32\n") != std::string::npos);
  CHECK(r.out.find("# bias is unset\n") != std::string::npos);

  write_text(dir / "dump.cfg", r.out);
  const auto again = run_cli({"train", "--config", dir / "dump.cfg", "--print-config"});
  CHECK(again.out == r.out);

  std::istringstream cfg_text("epochs = 5\narch = 16,8\n");
  const cli::RunConfig cfg = cli::resolve_config("train", cli::parse_config_file(cfg_text), {{"epochs", "7"}});
  CHECK(cfg.epochs == 7);
  CHECK(cfg.arch == std::vector<std::size_t>{16, 8});
  CHECK(cfg.delta == 1.0);
  CHECK(cfg.kind == SeriesKind::kPwv);
  CHECK(cli::resolve_config("convert", {}, {}).kind == SeriesKind::kZwd);

  std::istringstream unknown("epochz = 3\n");
  CHECK_THROWS_AS(cli::parse_config_file(unknown), ConfigError);
  std::istringstream malformed("epochs 3\n");
  CHECK_THROWS_AS(cli::parse_config_file(malformed), ConfigError);
  CHECK(run_cli({"train", "--config", dir / "missing.cfg", "--print-config"}).code == 1);
}
