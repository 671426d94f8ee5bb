#pragma once

#include <cstdint>
#include <vector>

#include "symfuse/image.hpp"
#include "symfuse/symmetry.hpp"

namespace symfuse {

/// Fingerprint quality parameters. The defaults are the working point used
/// throughout: tensor scale 0.6, symmetry scale 3, 8-pixel blocks, orders
/// {0,1}. downsize_factor 0 means automatic (2 when the longest image side
/// exceeds 300 pixels, 1 otherwise).
struct QualityConfig {
    double sigma1 = 0.6;
    double sigma2 = 3.0;
    int block_size = 8;
    std::vector<int> orders = {0, 1};
    double interest_threshold = 0.1;
    int downsize_factor = 0;
};

/// One real value per b x b block; partial edge blocks cover the leftover
/// pixels only.
struct BlockGrid {
    int block_size = 0;
    int cols = 0;
    int rows = 0;
    std::vector<double> values;

    BlockGrid() = default;
    BlockGrid(int b, int c, int r)
        : block_size(b), cols(c), rows(r), values(static_cast<std::size_t>(c) * r, 0.0) {}

    double& at(int col, int row) { return values[static_cast<std::size_t>(row) * cols + col]; }
    double at(int col, int row) const {
        return values[static_cast<std::size_t>(row) * cols + col];
    }
    std::size_t size() const { return values.size(); }
};

struct BoolGrid {
    int cols = 0;
    int rows = 0;
    std::vector<std::uint8_t> values;

    BoolGrid() = default;
    BoolGrid(int c, int r) : cols(c), rows(r), values(static_cast<std::size_t>(c) * r, 0) {}

    bool at(int col, int row) const {
        return values[static_cast<std::size_t>(row) * cols + col] != 0;
    }
    void set(int col, int row, bool v) {
        values[static_cast<std::size_t>(row) * cols + col] = v ? 1 : 0;
    }
    std::size_t size() const { return values.size(); }
};

/// Block-wise quality map plus the scalar summary. The grids live on the
/// downsized lattice; downsize_factor maps blocks back to source coordinates.
struct QualityReport {
    BlockGrid quality;        // q
    BlockGrid symmetry;       // s (block-averaged total symmetry)
    BlockGrid correlation;    // r
    BoolGrid interest;        // s > threshold
    double overall = 0.0;     // mean of q over interesting blocks, 0 if none
    int downsize_factor = 1;
};

/// Arithmetic mean of the covered pixels per b x b tile.
BlockGrid block_average(const RealField& field, int block_size);

/// Per-block Pearson correlation between two magnitude fields; 0 whenever
/// either block variance falls below 1e-12.
BlockGrid block_correlation(const RealField& a, const RealField& c, int block_size);

/// q = (1 - r)/2 * s per block. Throws NumericError when r leaves [-1, 1].
BlockGrid block_quality(const BlockGrid& correlation, const BlockGrid& symmetry);

/// True exactly where s > threshold (strict).
BoolGrid interest_mask(const BlockGrid& symmetry, double threshold);

/// Mean of q over true-mask blocks; 0 when the mask is empty.
double overall_quality(const BlockGrid& quality, const BoolGrid& mask);

/// Block-mean downsampling by an integer factor; edge cells average the
/// remaining pixels.
GrayImage downsize(const GrayImage& img, int factor);

/// Full pipeline: downsize, orientation tensor, normalized responses for the
/// configured orders, inhibition, total symmetry, block statistics.
QualityReport assess_fingerprint(const GrayImage& img, const QualityConfig& cfg);

/// Factor actually used for a given image under cfg (resolves the automatic rule).
int resolve_downsize_factor(const GrayImage& img, const QualityConfig& cfg);

}  // namespace symfuse
