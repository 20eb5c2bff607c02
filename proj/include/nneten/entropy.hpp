#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nneten/mnist_io.hpp"
#include "nneten/perceptron.hpp"
#include "nneten/reservoir.hpp"
#include "nneten/series_gen.hpp"

namespace nneten {

inline constexpr int kDefaultEpochs = 100;

/// Everything besides the series and the epoch count that determines the
/// entropy value. `fingerprint()` changes whenever any of it does.
struct EntropyConfig {
  PixelPattern pattern = PixelPattern::identity();
  double learning_rate = kLearningRate;

  std::string description() const;
  std::string fingerprint() const;
};

struct EntropyReport {
  double nneten = 0.0;
  int epochs = 0;
  double accuracy_percent = 0.0;
  std::size_t correct = 0;
  std::size_t train_count = 0;
  std::size_t test_count = 0;
  std::size_t series_length = 0;
  SeriesMeta series_meta;
  std::string fingerprint;
  double wall_ms = 0.0;
};

struct InertiaReport {
  int ep1 = 0;
  int ep2 = 0;
  double nneten_ep1 = 0.0;
  double nneten_ep2 = 0.0;
  double delta = 0.0;
};

struct SweepRow {
  double parameter = 0.0;
  int epochs = 0;
  std::optional<EntropyReport> report;  // empty when the point diverged
  std::string note;
};

struct SweepResult {
  std::string parameter_name;
  std::vector<SweepRow> rows;
};

struct InertiaRow {
  double parameter = 0.0;
  std::optional<InertiaReport> report;
  std::string note;
};

/// Trains one network and reports the entropy after each checkpoint epoch.
/// Checkpoints must be strictly ascending and >= 1.
std::vector<EntropyReport> nnet_en_checkpoints(const TimeSeries& series, std::span<const int> checkpoints,
                                               const mnist::MnistDataset& dataset,
                                               const EntropyConfig& config = {});

EntropyReport nnet_en(const TimeSeries& series, int epochs, const mnist::MnistDataset& dataset,
                      const EntropyConfig& config = {});

/// (nneten_ep2 - nneten_ep1) / nneten_ep2.
double inertia_delta(double nneten_ep1, double nneten_ep2);

InertiaReport learning_inertia(const TimeSeries& series, int ep1, int ep2,
                               const mnist::MnistDataset& dataset, const EntropyConfig& config = {});

SweepResult epoch_sweep(const TimeSeries& series, std::span<const int> checkpoints,
                        const mnist::MnistDataset& dataset, const EntropyConfig& config = {});

/// start, start + step, ... up to `end` inclusive (with a 1e-9 step slack).
std::vector<double> parameter_grid(double start, double end, double step);

/// One entropy per r on the grid. Each series comes from `base` with r
/// replaced, `length` samples long. Divergent points become empty rows.
SweepResult r_sweep(const MapParams& base, std::span<const double> grid, int epochs,
                    const mnist::MnistDataset& dataset, const EntropyConfig& config = {},
                    std::size_t length = kStandardLength, unsigned threads = 1);

std::vector<InertiaRow> inertia_sweep(const MapParams& base, std::span<const double> grid, int ep1,
                                      int ep2, const mnist::MnistDataset& dataset,
                                      const EntropyConfig& config = {},
                                      std::size_t length = kStandardLength, unsigned threads = 1);

/// Entropy of each leading prefix of `source`; lengths strictly ascending.
SweepResult length_sweep(const TimeSeries& source, std::span<const std::size_t> lengths, int epochs,
                         const mnist::MnistDataset& dataset, const EntropyConfig& config = {},
                         unsigned threads = 1);

/// `param,nneten,accuracy_percent,epochs,wall_ms`; wall time only when asked.
void write_sweep_csv(std::ostream& out, const SweepResult& sweep, bool with_timing = false);
void write_inertia_csv(std::ostream& out, const std::vector<InertiaRow>& rows);

/// `NNetEn = 0.1234`
std::string format_report_line(const EntropyReport& report);
/// key,value block with full-precision values.
void write_report_csv(std::ostream& out, const EntropyReport& report, bool with_timing = false);

}  // namespace nneten
