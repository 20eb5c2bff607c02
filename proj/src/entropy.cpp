#include "nneten/entropy.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "parallel.hpp"

namespace nneten {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

void check_checkpoints(std::span<const int> checkpoints) {
  if (checkpoints.empty()) throw Error(ErrorKind::InvalidParam, "no epoch checkpoints given");
  int previous = 0;
  for (int e : checkpoints) {
    if (e <= previous) {
      throw Error(ErrorKind::InvalidParam, "epoch checkpoints must be >= 1 and strictly ascending");
    }
    previous = e;
  }
}

std::span<const std::uint8_t> labels_of(const mnist::LabelSet& labels) {
  return {labels.data(), labels.size()};
}

std::string csv_field(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

MapParams with_r(const MapParams& base, double r) {
  MapParams p = base;
  p.r = r;
  return p;
}

}  // namespace

std::string EntropyConfig::description() const {
  std::ostringstream out;
  out << "reservoir=25x785,fill=column-major;pattern=" << pattern.id()
      << ";input=bias-first,pixel/255;norm=minmax-train,degenerate=0,unclamped"
      << ";hidden-bias=appended;w2-init=0.5;activation=sigmoid;loss=squared-error"
      << ";update=online-delta;lr=" << format_real(learning_rate)
      << ";order=file;targets=one-hot;argmax=pre-activation,lowest-index";
  return out.str();
}

std::string EntropyConfig::fingerprint() const {
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx",
                static_cast<unsigned long long>(fnv1a(description())));
  return buffer;
}

std::vector<EntropyReport> nnet_en_checkpoints(const TimeSeries& series, std::span<const int> checkpoints,
                                               const mnist::MnistDataset& dataset,
                                               const EntropyConfig& config) {
  check_checkpoints(checkpoints);
  if (series.size() < 1) throw Error(ErrorKind::EmptySeries, "time series is empty");
  if (dataset.train_count() == 0 || dataset.test_count() == 0) {
    throw Error(ErrorKind::InvalidParam, "dataset needs non-empty train and test splits");
  }
  const auto start = Clock::now();

  const auto reservoir = fill_matrix(series.values);
  const MatrixX<double> train_raw = compute_activations(reservoir, dataset.train_images, config.pattern);
  const auto coeffs = compute_norm_coeffs(train_raw);
  const MatrixX<double> train_hidden = normalize_with_bias(train_raw, coeffs);
  const MatrixX<double> test_hidden = normalize_with_bias(
      compute_activations(reservoir, dataset.test_images, config.pattern), coeffs);

  auto weights = init_weights<double>();
  const auto fingerprint = config.fingerprint();
  std::vector<EntropyReport> reports;
  reports.reserve(checkpoints.size());
  auto next = checkpoints.begin();
  for (int epoch = 1; next != checkpoints.end(); ++epoch) {
    train_epoch(weights, train_hidden, labels_of(dataset.train_labels), config.learning_rate);
    if (epoch != *next) continue;

    EntropyReport report;
    report.epochs = epoch;
    report.correct = count_correct(weights, test_hidden, labels_of(dataset.test_labels));
    report.accuracy_percent =
        100.0 * static_cast<double>(report.correct) / static_cast<double>(dataset.test_count());
    report.nneten = report.accuracy_percent / 100.0;
    report.train_count = dataset.train_count();
    report.test_count = dataset.test_count();
    report.series_length = static_cast<std::size_t>(series.size());
    report.series_meta = series.meta;
    report.fingerprint = fingerprint;
    report.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    reports.push_back(std::move(report));
    ++next;
  }
  return reports;
}

EntropyReport nnet_en(const TimeSeries& series, int epochs, const mnist::MnistDataset& dataset,
                      const EntropyConfig& config) {
  const int checkpoint[] = {epochs};
  return nnet_en_checkpoints(series, checkpoint, dataset, config).front();
}

double inertia_delta(double nneten_ep1, double nneten_ep2) {
  if (nneten_ep2 == 0.0) {
    throw Error(ErrorKind::ZeroDenominator, "learning inertia undefined: NNetEn at Ep2 is zero");
  }
  return (nneten_ep2 - nneten_ep1) / nneten_ep2;
}

InertiaReport learning_inertia(const TimeSeries& series, int ep1, int ep2,
                               const mnist::MnistDataset& dataset, const EntropyConfig& config) {
  if (ep1 < 1 || ep2 <= ep1) throw Error(ErrorKind::InvalidParam, "need 1 <= ep1 < ep2");
  const int checkpoints[] = {ep1, ep2};
  const auto reports = nnet_en_checkpoints(series, checkpoints, dataset, config);
  InertiaReport out;
  out.ep1 = ep1;
  out.ep2 = ep2;
  out.nneten_ep1 = reports[0].nneten;
  out.nneten_ep2 = reports[1].nneten;
  out.delta = inertia_delta(out.nneten_ep1, out.nneten_ep2);
  return out;
}

SweepResult epoch_sweep(const TimeSeries& series, std::span<const int> checkpoints,
                        const mnist::MnistDataset& dataset, const EntropyConfig& config) {
  SweepResult sweep;
  sweep.parameter_name = "epochs";
  for (auto& report : nnet_en_checkpoints(series, checkpoints, dataset, config)) {
    SweepRow row;
    row.parameter = report.epochs;
    row.epochs = report.epochs;
    row.report = std::move(report);
    sweep.rows.push_back(std::move(row));
  }
  return sweep;
}

std::vector<double> parameter_grid(double start, double end, double step) {
  if (!std::isfinite(start) || !std::isfinite(end) || !std::isfinite(step) || step <= 0.0 || end < start) {
    throw Error(ErrorKind::InvalidGrid, "grid needs finite start <= end and step > 0");
  }
  const double span = (end - start) / step;
  if (span > 1e7) throw Error(ErrorKind::InvalidGrid, "grid has more than 1e7 points");
  const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = start + static_cast<double>(i) * step;
  return grid;
}

SweepResult r_sweep(const MapParams& base, std::span<const double> grid, int epochs,
                    const mnist::MnistDataset& dataset, const EntropyConfig& config, std::size_t length,
                    unsigned threads) {
  if (grid.empty()) throw Error(ErrorKind::InvalidGrid, "empty parameter grid");
  SweepResult sweep;
  sweep.parameter_name = "r";
  sweep.rows = detail::parallel_map<SweepRow>(grid.size(), threads, [&](std::size_t i) {
    SweepRow row;
    row.parameter = grid[i];
    row.epochs = epochs;
    try {
      const auto series = generate(with_r(base, grid[i]), length);
      row.report = nnet_en(series, epochs, dataset, config);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Divergence) throw;
      row.note = e.what();
    }
    return row;
  });
  return sweep;
}

std::vector<InertiaRow> inertia_sweep(const MapParams& base, std::span<const double> grid, int ep1, int ep2,
                                      const mnist::MnistDataset& dataset, const EntropyConfig& config,
                                      std::size_t length, unsigned threads) {
  if (grid.empty()) throw Error(ErrorKind::InvalidGrid, "empty parameter grid");
  return detail::parallel_map<InertiaRow>(grid.size(), threads, [&](std::size_t i) {
    InertiaRow row;
    row.parameter = grid[i];
    try {
      const auto series = generate(with_r(base, grid[i]), length);
      row.report = learning_inertia(series, ep1, ep2, dataset, config);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Divergence && e.kind() != ErrorKind::ZeroDenominator) throw;
      row.note = e.what();
    }
    return row;
  });
}

SweepResult length_sweep(const TimeSeries& source, std::span<const std::size_t> lengths, int epochs,
                         const mnist::MnistDataset& dataset, const EntropyConfig& config,
                         unsigned threads) {
  if (lengths.empty()) throw Error(ErrorKind::InvalidGrid, "no lengths given");
  std::size_t previous = 0;
  for (auto n : lengths) {
    if (n <= previous) throw Error(ErrorKind::InvalidGrid, "lengths must be >= 1 and strictly ascending");
    previous = n;
  }
  SweepResult sweep;
  sweep.parameter_name = "N";
  sweep.rows = detail::parallel_map<SweepRow>(lengths.size(), threads, [&](std::size_t i) {
    SweepRow row;
    row.parameter = static_cast<double>(lengths[i]);
    row.epochs = epochs;
    row.report = nnet_en(prefix(source, lengths[i]), epochs, dataset, config);
    return row;
  });
  return sweep;
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep, bool with_timing) {
  out << "param,nneten,accuracy_percent,epochs,wall_ms\n";
  for (const auto& row : sweep.rows) {
    out << format_real(row.parameter) << ',';
    if (row.report) {
      out << format_real(row.report->nneten) << ',' << format_real(row.report->accuracy_percent);
    } else {
      out << ',';
    }
    out << ',' << row.epochs << ',';
    if (with_timing && row.report) out << static_cast<long long>(std::llround(row.report->wall_ms));
    out << '\n';
  }
}

void write_inertia_csv(std::ostream& out, const std::vector<InertiaRow>& rows) {
  out << "param,ep1,ep2,nneten_ep1,nneten_ep2,delta\n";
  for (const auto& row : rows) {
    out << format_real(row.parameter) << ',';
    if (row.report) {
      const auto& r = *row.report;
      out << r.ep1 << ',' << r.ep2 << ',' << format_real(r.nneten_ep1) << ','
          << format_real(r.nneten_ep2) << ',' << format_real(r.delta);
    } else {
      out << ",,,,";
    }
    out << '\n';
  }
}

std::string format_report_line(const EntropyReport& report) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "NNetEn = %.4f", report.nneten);
  return buffer;
}

void write_report_csv(std::ostream& out, const EntropyReport& report, bool with_timing) {
  out << "key,value\n"
      << "nneten," << format_real(report.nneten) << '\n'
      << "accuracy_percent," << format_real(report.accuracy_percent) << '\n'
      << "correct," << report.correct << '\n'
      << "epochs," << report.epochs << '\n'
      << "train_count," << report.train_count << '\n'
      << "test_count," << report.test_count << '\n'
      << "series_length," << report.series_length << '\n'
      << "series_source," << csv_field(report.series_meta.source) << '\n';
  if (report.series_meta.seed) out << "series_seed," << *report.series_meta.seed << '\n';
  out << "fingerprint," << report.fingerprint << '\n';
  if (with_timing) out << "wall_ms," << static_cast<long long>(std::llround(report.wall_ms)) << '\n';
}

}  // namespace nneten
