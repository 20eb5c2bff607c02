// nneten: command-line front end for NNetEn entropy, learning inertia,
// figure-reproduction sweeps and the classical baseline estimators.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "nneten/baselines.hpp"
#include "nneten/entropy.hpp"
#include "nneten/error.hpp"
#include "nneten/mnist_io.hpp"
#include "nneten/series_gen.hpp"

namespace {

using namespace nneten;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitEnvironment = 3;
constexpr int kExitNumerical = 4;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::EmptySeries:
    case ErrorKind::InvalidParam:
    case ErrorKind::InvalidGrid:
    case ErrorKind::TooShort:
    case ErrorKind::IoError:
      return kExitUsage;
    case ErrorKind::WrongMagic:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::Truncated:
    case ErrorKind::LabelOutOfRange:
    case ErrorKind::MissingFile:
    case ErrorKind::NetworkError:
    case ErrorKind::ValidationFailed:
      return kExitEnvironment;
    case ErrorKind::Divergence:
    case ErrorKind::ZeroDenominator:
      return kExitNumerical;
  }
  return kExitUsage;
}

struct DatasetOptions {
  std::string mnist_dir;
  std::optional<std::size_t> train_limit;
  std::optional<std::size_t> test_limit;

  void attach(CLI::App& cmd) {
    cmd.add_option("--mnist", mnist_dir, "MNIST directory (default: $NNETEN_MNIST_DIR)");
    cmd.add_option("--train-limit", train_limit, "Use only the first N training images")
        ->check(CLI::PositiveNumber);
    cmd.add_option("--test-limit", test_limit, "Use only the first N test images")
        ->check(CLI::PositiveNumber);
  }

  mnist::MnistDataset load() const {
    fs::path dir;
    if (!mnist_dir.empty()) {
      dir = mnist_dir;
    } else if (auto env = mnist::default_directory()) {
      dir = *env;
    } else {
      throw Error(ErrorKind::MissingFile,
                  "no MNIST directory: pass --mnist or set NNETEN_MNIST_DIR "
                  "(`nneten fetch-mnist --dir <dir>` downloads the dataset)");
    }
    if (train_limit || test_limit) {
      std::cerr << "warning: reduced dataset (train limit "
                << (train_limit ? std::to_string(*train_limit) : "none") << ", test limit "
                << (test_limit ? std::to_string(*test_limit) : "none")
                << "); values are not comparable with full-dataset results\n";
    }
    return mnist::load_dataset(dir, train_limit, test_limit);
  }
};

struct MapOptions {
  std::string map;
  std::optional<double> r;
  std::optional<double> r1;
  std::optional<double> amplitude;
  std::optional<double> x0;
  std::optional<double> y0;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> discard;
  std::size_t n = kStandardLength;

  void attach(CLI::App& cmd, bool with_length = true) {
    cmd.add_option("--map", map, "logistic|sine|planck|henon|random|periodic|binary|constant");
    cmd.add_option("--r", r, "Control parameter of the chaotic maps");
    cmd.add_option("--r1", r1, "Henon coupling (default 0.3)");
    cmd.add_option("--A", amplitude, "Amplitude of the periodic and constant maps (default 1)");
    cmd.add_option("--x0", x0, "Initial condition x0");
    cmd.add_option("--y0", y0, "Henon initial condition y0");
    cmd.add_option("--seed", seed, "Seed of the random map (default 5489)");
    cmd.add_option("--discard", discard, "Transient samples to drop (default 1000 for chaotic maps)");
    if (with_length) cmd.add_option("--n", n, "Series length")->check(CLI::PositiveNumber);
  }

  bool given() const { return !map.empty(); }

  MapParams params() const {
    const auto kind = parse_map_kind(map);
    if (!kind) throw Error(ErrorKind::InvalidParam, "unknown map '" + map + "'");
    auto p = MapParams::defaults(*kind);
    if (r) p.r = *r;
    if (r1) p.r1 = *r1;
    if (amplitude) p.amplitude = *amplitude;
    if (x0) p.x0 = *x0;
    if (y0) p.y0 = *y0;
    if (seed) p.seed = *seed;
    if (discard) p.discard = *discard;
    return p;
  }
};

struct OutputOptions {
  std::string out;

  void attach(CLI::App& cmd) { cmd.add_option("--out", out, "Output file (default: stdout)"); }

  void write(const std::string& text) const {
    if (out.empty()) {
      std::cout << text;
      std::cout.flush();
      return;
    }
    std::ofstream file(out, std::ios::binary | std::ios::trunc);
    if (!file) throw Error(ErrorKind::IoError, "cannot open " + out + " for writing");
    file << text;
    file.flush();
    if (!file) throw Error(ErrorKind::IoError, "failed writing " + out);
  }
};

TimeSeries series_from(const std::string& input, const MapOptions& map, std::size_t length) {
  if (!input.empty() && map.given()) {
    throw Error(ErrorKind::InvalidParam, "give either an input file or --map, not both");
  }
  if (!input.empty()) return read_series(input);
  if (map.given()) return generate(map.params(), length);
  throw Error(ErrorKind::InvalidParam, "no series: give an input file or --map");
}

unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

void require_grid(const std::optional<double>& start, const std::optional<double>& end,
                  const std::optional<double>& step) {
  if (!start || !end || !step) {
    throw Error(ErrorKind::InvalidGrid, "--r-start, --r-end and --r-step are all required");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NNetEn: time-series entropy from MNIST classification accuracy"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "nneten 1.0.0");

  // calc
  std::string calc_input;
  std::string calc_format = "text";
  int calc_epochs = kDefaultEpochs;
  bool calc_timing = false;
  std::vector<int> calc_epoch_list;
  DatasetOptions calc_data;
  OutputOptions calc_out;
  auto* calc = app.add_subcommand("calc", "NNetEn of a series stored in a text file");
  calc->add_option("input", calc_input, "Series file: whitespace-separated numbers, '#' comments")->required();
  calc->add_option("--epochs", calc_epochs, "Training epochs")->check(CLI::PositiveNumber);
  calc->add_option("--format", calc_format, "text or csv")->check(CLI::IsMember({"text", "csv"}));
  calc->add_flag("--timing", calc_timing, "Include wall time in csv output");
  calc->add_option("--epoch-list", calc_epoch_list,
                   "Comma-separated ascending epoch checkpoints; one training run, CSV output")
      ->delimiter(',')
      ->excludes("--epochs");
  calc_data.attach(*calc);
  calc_out.attach(*calc);

  // gen
  MapOptions gen_map;
  OutputOptions gen_out;
  auto* gen = app.add_subcommand("gen", "Generate a series from one of the built-in maps");
  gen_map.attach(*gen);
  gen->get_option("--map")->required();
  gen_out.attach(*gen);

  // sweep
  MapOptions sweep_map;
  std::optional<double> sweep_start, sweep_end, sweep_step;
  int sweep_epochs = kDefaultEpochs;
  unsigned sweep_threads = default_threads();
  bool sweep_timing = false;
  DatasetOptions sweep_data;
  OutputOptions sweep_out;
  auto* sweep = app.add_subcommand("sweep", "NNetEn over a grid of the control parameter r (CSV)");
  sweep_map.attach(*sweep);
  sweep->get_option("--map")->required();
  sweep->add_option("--r-start", sweep_start, "First r");
  sweep->add_option("--r-end", sweep_end, "Last r (inclusive)");
  sweep->add_option("--r-step", sweep_step, "Grid step");
  sweep->add_option("--epochs", sweep_epochs, "Training epochs")->check(CLI::PositiveNumber);
  sweep->add_option("--threads", sweep_threads, "Grid points evaluated concurrently")->check(CLI::PositiveNumber);
  sweep->add_flag("--timing", sweep_timing, "Fill the wall_ms column");
  sweep_data.attach(*sweep);
  sweep_out.attach(*sweep);

  // inertia
  std::string inertia_input;
  MapOptions inertia_map;
  int inertia_ep1 = 100;
  int inertia_ep2 = 400;
  std::optional<double> inertia_start, inertia_end, inertia_step;
  unsigned inertia_threads = default_threads();
  DatasetOptions inertia_data;
  OutputOptions inertia_out;
  auto* inertia = app.add_subcommand("inertia", "Learning inertia (NNetEn(ep2) - NNetEn(ep1)) / NNetEn(ep2)");
  inertia->add_option("input", inertia_input, "Series file");
  inertia_map.attach(*inertia);
  inertia->add_option("--ep1", inertia_ep1, "Smaller epoch count")->check(CLI::PositiveNumber);
  inertia->add_option("--ep2", inertia_ep2, "Larger epoch count")->check(CLI::PositiveNumber);
  inertia->add_option("--r-start", inertia_start, "r-grid mode: first r");
  inertia->add_option("--r-end", inertia_end, "r-grid mode: last r (inclusive)");
  inertia->add_option("--r-step", inertia_step, "r-grid mode: grid step");
  inertia->add_option("--threads", inertia_threads, "Grid points evaluated concurrently")->check(CLI::PositiveNumber);
  inertia_data.attach(*inertia);
  inertia_out.attach(*inertia);

  // lengths
  std::string lengths_input;
  MapOptions lengths_map;
  std::vector<std::size_t> lengths_list;
  int lengths_epochs = kDefaultEpochs;
  unsigned lengths_threads = default_threads();
  bool lengths_timing = false;
  DatasetOptions lengths_data;
  OutputOptions lengths_out;
  auto* lengths = app.add_subcommand("lengths", "NNetEn of leading prefixes of a series (CSV)");
  lengths->add_option("input", lengths_input, "Series file");
  lengths_map.attach(*lengths, false);
  lengths->add_option("--n-list", lengths_list, "Comma-separated ascending lengths")
      ->delimiter(',')
      ->required();
  lengths->add_option("--epochs", lengths_epochs, "Training epochs")->check(CLI::PositiveNumber);
  lengths->add_option("--threads", lengths_threads, "Lengths evaluated concurrently")->check(CLI::PositiveNumber);
  lengths->add_flag("--timing", lengths_timing, "Fill the wall_ms column");
  lengths_data.attach(*lengths);
  lengths_out.attach(*lengths);

  // baseline
  std::string baseline_input;
  std::string baseline_method = "apen";
  std::optional<int> baseline_m;
  double baseline_rr = 0.2;
  int baseline_d = 1;
  std::string baseline_tolerance = "sd";
  std::string baseline_format = "text";
  OutputOptions baseline_out;
  auto* baseline = app.add_subcommand("baseline", "ApEn, SampEn or PerEn of a series file");
  baseline->add_option("input", baseline_input, "Series file")->required();
  baseline->add_option("--method", baseline_method, "apen, sampen, peren or all")
      ->check(CLI::IsMember({"apen", "sampen", "peren", "all"}));
  baseline->add_option("--m", baseline_m, "Embedding dimension / pattern order (default 2; 4 for peren)");
  baseline->add_option("--rr", baseline_rr, "Tolerance factor");
  baseline->add_option("--d", baseline_d, "Permutation delay");
  baseline->add_option("--tolerance", baseline_tolerance, "sd: rr times the SD; absolute: rr as is")
      ->check(CLI::IsMember({"sd", "absolute"}));
  baseline->add_option("--format", baseline_format, "text or csv")->check(CLI::IsMember({"text", "csv"}));
  baseline_out.attach(*baseline);

  // fetch-mnist
  std::string fetch_dir;
  std::string fetch_url;
  auto* fetch = app.add_subcommand("fetch-mnist", "Download and validate the four MNIST files");
  fetch->add_option("--dir", fetch_dir, "Target directory (default: $NNETEN_MNIST_DIR)");
  fetch->add_option("--base-url", fetch_url, "Mirror URL (default: $NNETEN_MNIST_URL or the built-in mirror)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*calc) {
      const auto series = read_series(calc_input);
      const auto data = calc_data.load();
      std::ostringstream text;
      if (!calc_epoch_list.empty()) {
        write_sweep_csv(text, epoch_sweep(series, calc_epoch_list, data), calc_timing);
      } else {
        const auto report = nnet_en(series, calc_epochs, data);
        if (calc_format == "csv") {
          write_report_csv(text, report, calc_timing);
        } else {
          text << format_report_line(report) << '\n';
        }
      }
      calc_out.write(text.str());
    } else if (*gen) {
      gen_out.write(format_series(generate(gen_map.params(), gen_map.n)));
    } else if (*sweep) {
      require_grid(sweep_start, sweep_end, sweep_step);
      const auto params = sweep_map.params();
      if (!is_chaotic(params.kind)) {
        throw Error(ErrorKind::InvalidParam, "r sweeps need logistic, sine, planck or henon");
      }
      const auto grid = parameter_grid(*sweep_start, *sweep_end, *sweep_step);
      const auto data = sweep_data.load();
      const auto result = r_sweep(params, grid, sweep_epochs, data, {}, sweep_map.n, sweep_threads);
      std::ostringstream text;
      write_sweep_csv(text, result, sweep_timing);
      sweep_out.write(text.str());
      for (const auto& row : result.rows) {
        if (!row.report) std::cerr << "r=" << format_real(row.parameter) << ": " << row.note << '\n';
      }
    } else if (*inertia) {
      if (inertia_ep1 >= inertia_ep2) throw Error(ErrorKind::InvalidParam, "need --ep1 < --ep2");
      std::ostringstream text;
      if (inertia_start || inertia_end || inertia_step) {
        require_grid(inertia_start, inertia_end, inertia_step);
        if (!inertia_input.empty() || !inertia_map.given()) {
          throw Error(ErrorKind::InvalidParam, "r-grid mode needs --map and no input file");
        }
        const auto grid = parameter_grid(*inertia_start, *inertia_end, *inertia_step);
        const auto data = inertia_data.load();
        write_inertia_csv(text, inertia_sweep(inertia_map.params(), grid, inertia_ep1, inertia_ep2, data, {},
                                              inertia_map.n, inertia_threads));
      } else {
        const auto series = series_from(inertia_input, inertia_map, inertia_map.n);
        const auto data = inertia_data.load();
        const auto report = learning_inertia(series, inertia_ep1, inertia_ep2, data);
        text << "NNetEn(" << report.ep1 << ") = " << format_real(report.nneten_ep1) << '\n'
             << "NNetEn(" << report.ep2 << ") = " << format_real(report.nneten_ep2) << '\n'
             << "delta(" << report.ep1 << '/' << report.ep2 << ") = " << format_real(report.delta) << '\n';
      }
      inertia_out.write(text.str());
    } else if (*lengths) {
      std::size_t longest = 0;
      for (auto n : lengths_list) longest = std::max(longest, n);
      const auto source = series_from(lengths_input, lengths_map, longest);
      const auto data = lengths_data.load();
      std::ostringstream text;
      write_sweep_csv(text, length_sweep(source, lengths_list, lengths_epochs, data, {}, lengths_threads),
                      lengths_timing);
      lengths_out.write(text.str());
    } else if (*baseline) {
      const auto series = read_series(baseline_input);
      const auto mode = baseline_tolerance == "absolute" ? ToleranceMode::Absolute : ToleranceMode::StdScaled;
      const std::vector<std::string> methods =
          baseline_method == "all" ? std::vector<std::string>{"apen", "sampen", "peren"}
                                   : std::vector<std::string>{baseline_method};
      std::ostringstream text;
      if (baseline_format == "csv") text << "method,params,value\n";
      for (const auto& method : methods) {
        Estimate estimate;
        std::string name;
        std::ostringstream params;
        if (method == "peren") {
          const int m = baseline_m.value_or(4);
          estimate = perm_en(series.values, m, baseline_d);
          name = "PerEn";
          params << "m=" << m << " d=" << baseline_d;
        } else {
          const int m = baseline_m.value_or(2);
          estimate = method == "apen" ? ap_en(series.values, m, baseline_rr, mode)
                                      : samp_en(series.values, m, baseline_rr, mode);
          name = method == "apen" ? "ApEn" : "SampEn";
          params << "m=" << m << " rr=" << format_real(baseline_rr) << " tolerance=" << baseline_tolerance;
        }
        if (estimate.flag != EstimateFlag::None) {
          std::cerr << name << ": " << to_string(estimate.flag) << '\n';
        }
        if (baseline_format == "csv") {
          text << name << ',' << params.str() << ',' << format_real(estimate.value) << '\n';
        } else {
          text << name << '(' << params.str() << ") = " << format_real(estimate.value) << '\n';
        }
      }
      baseline_out.write(text.str());
    } else if (*fetch) {
      fs::path dir;
      if (!fetch_dir.empty()) {
        dir = fetch_dir;
      } else if (auto env = mnist::default_directory()) {
        dir = *env;
      } else {
        throw Error(ErrorKind::InvalidParam, "no target directory: pass --dir or set NNETEN_MNIST_DIR");
      }
      const auto url = fetch_url.empty() ? mnist::default_base_url() : fetch_url;
      for (const auto& path : mnist::fetch_mnist(url, dir)) std::cout << path.string() << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}
