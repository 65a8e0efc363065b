#pragma once

#include <cstdint>
#include <filesystem>

#include "fakecatcher/rppg.hpp"

namespace fc {

// Quantized per-segment map: row n = frame n, column k = sub-region k.
// Spectral maps append one binned-PSD column per sub-region.
struct PpgMap {
    enum class Kind { temporal, spectral };
    int rows = 0;
    int cols = 0;
    Kind kind = Kind::temporal;
    std::vector<std::uint8_t> data;                // row-major
    std::vector<std::uint8_t> constant_columns;    // per-column degenerate flags

    std::uint8_t at(int r, int c) const {
        return data[static_cast<std::size_t>(r) * cols + c];
    }
    void validate() const;
};

// 32 per-cell traces of length omega -> omega x 32 map; each column is
// min-max quantized to [0,255] independently. A constant trace maps to a
// zero column and is flagged.
PpgMap build_ppg_map(const std::vector<Signal>& cell_traces);

// omega x 64: columns 0-31 as the temporal map, columns 32-63 hold each
// cell's omega-binned power spectrum, min-max quantized.
PpgMap build_spectral_map(const std::vector<Signal>& cell_traces, double fps);

void save_ppg_map(const std::filesystem::path& path, const PpgMap& map);
PpgMap load_ppg_map(const std::filesystem::path& path, PpgMap::Kind kind);

struct CnnConfig {
    std::array<int, 3> conv_filters = {8, 16, 32};
    int dense_units = 128;
    double dropout = 0.5;
    double learning_rate = 1e-3;
    double momentum = 0.9;
    int batch_size = 16;
};

// Three 3x3 convolution layers (stride 1, zero padding) with ReLU and 2x2
// max pooling, a dense ReLU layer with dropout, and a sigmoid output unit.
// All parameters live in one flat vector.
struct CnnModel {
    int input_rows = 0;
    int input_cols = 0;
    CnnConfig cfg;
    std::vector<double> params;

    struct Layout {
        // conv weights are [out][in][3][3]; dense1 is [units][flat]
        std::size_t conv_w[3], conv_b[3];
        std::size_t dense1_w, dense1_b;
        std::size_t dense2_w, dense2_b;
        std::size_t total;
        int pooled_rows[3], pooled_cols[3];
        int flat_size;
    };
    Layout layout() const;

    static CnnModel init(int rows, int cols, const CnnConfig& cfg, std::uint64_t seed);

    void save(const std::filesystem::path& path) const;
    static CnnModel load(const std::filesystem::path& path);
};

// p_fake in (0,1); evaluation mode (no dropout).
double cnn_forward(const CnnModel& model, const PpgMap& map);

// Binary cross-entropy loss and its gradient for one sample under a fixed
// dropout mask (mask entries are 0 or 1/(1-p); empty = no dropout).
double cnn_loss(const CnnModel& model, const PpgMap& map, int label,
                const std::vector<double>& dropout_mask, std::vector<double>* grad);

struct CnnTrainResult {
    std::vector<double> epoch_loss;
    bool single_class_warning = false;
};

// Mini-batch gradient descent with momentum; deterministic for a fixed seed.
// Stops early once the epoch loss drops below stop_loss (0 disables).
CnnTrainResult cnn_train(CnnModel& model, const std::vector<PpgMap>& maps,
                         const std::vector<int>& labels, int epochs, std::uint64_t seed,
                         double stop_loss = 0.0);

// Max relative error between analytic and central-difference gradients over
// n_samples randomly chosen parameters.
double cnn_gradcheck(const CnnModel& model, const PpgMap& map, int label, int n_samples,
                     double h, std::uint64_t seed);

}  // namespace fc
