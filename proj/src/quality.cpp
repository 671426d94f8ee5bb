#include "symfuse/quality.hpp"

#include <algorithm>
#include <cmath>

namespace symfuse {

namespace {

constexpr double kVarianceEpsilon = 1e-12;

int grid_dim(int pixels, int block) { return (pixels + block - 1) / block; }

void require_same_shape(const RealField& a, const RealField& b, const char* what) {
    if (a.width != b.width || a.height != b.height) {
        throw NumericError(std::string(what) + ": field size mismatch");
    }
}

}  // namespace

BlockGrid block_average(const RealField& field, int block_size) {
    if (block_size < 2) throw NumericError("block_average: block size must be >= 2");
    BlockGrid grid(block_size, grid_dim(field.width, block_size),
                   grid_dim(field.height, block_size));
    for (int br = 0; br < grid.rows; ++br) {
        for (int bc = 0; bc < grid.cols; ++bc) {
            const int x0 = bc * block_size;
            const int y0 = br * block_size;
            const int x1 = std::min(x0 + block_size, field.width);
            const int y1 = std::min(y0 + block_size, field.height);
            double sum = 0.0;
            for (int y = y0; y < y1; ++y) {
                for (int x = x0; x < x1; ++x) sum += field.at(x, y);
            }
            grid.at(bc, br) = sum / ((x1 - x0) * (y1 - y0));
        }
    }
    return grid;
}

BlockGrid block_correlation(const RealField& a, const RealField& c, int block_size) {
    if (block_size < 2) throw NumericError("block_correlation: block size must be >= 2");
    require_same_shape(a, c, "block_correlation");
    BlockGrid grid(block_size, grid_dim(a.width, block_size), grid_dim(a.height, block_size));
    for (int br = 0; br < grid.rows; ++br) {
        for (int bc = 0; bc < grid.cols; ++bc) {
            const int x0 = bc * block_size;
            const int y0 = br * block_size;
            const int x1 = std::min(x0 + block_size, a.width);
            const int y1 = std::min(y0 + block_size, a.height);
            const int n = (x1 - x0) * (y1 - y0);
            double mean_a = 0.0, mean_c = 0.0;
            for (int y = y0; y < y1; ++y) {
                for (int x = x0; x < x1; ++x) {
                    mean_a += a.at(x, y);
                    mean_c += c.at(x, y);
                }
            }
            mean_a /= n;
            mean_c /= n;
            double var_a = 0.0, var_c = 0.0, cov = 0.0;
            for (int y = y0; y < y1; ++y) {
                for (int x = x0; x < x1; ++x) {
                    const double da = a.at(x, y) - mean_a;
                    const double dc = c.at(x, y) - mean_c;
                    var_a += da * da;
                    var_c += dc * dc;
                    cov += da * dc;
                }
            }
            var_a /= n;
            var_c /= n;
            cov /= n;
            if (var_a < kVarianceEpsilon || var_c < kVarianceEpsilon) {
                grid.at(bc, br) = 0.0;
            } else {
                grid.at(bc, br) = std::clamp(cov / std::sqrt(var_a * var_c), -1.0, 1.0);
            }
        }
    }
    return grid;
}

BlockGrid block_quality(const BlockGrid& correlation, const BlockGrid& symmetry) {
    if (correlation.cols != symmetry.cols || correlation.rows != symmetry.rows) {
        throw NumericError("block_quality: grid shape mismatch");
    }
    BlockGrid out(symmetry.block_size, symmetry.cols, symmetry.rows);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double r = correlation.values[i];
        if (r < -1.0 || r > 1.0) {
            throw NumericError("block_quality: correlation outside [-1, 1]");
        }
        out.values[i] = 0.5 * (1.0 - r) * symmetry.values[i];
    }
    return out;
}

BoolGrid interest_mask(const BlockGrid& symmetry, double threshold) {
    if (threshold < 0) throw NumericError("interest_mask: threshold must be >= 0");
    BoolGrid mask(symmetry.cols, symmetry.rows);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        mask.values[i] = symmetry.values[i] > threshold ? 1 : 0;
    }
    return mask;
}

double overall_quality(const BlockGrid& quality, const BoolGrid& mask) {
    if (quality.cols != mask.cols || quality.rows != mask.rows) {
        throw NumericError("overall_quality: grid shape mismatch");
    }
    double sum = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < quality.size(); ++i) {
        if (mask.values[i]) {
            sum += quality.values[i];
            ++n;
        }
    }
    return n > 0 ? sum / n : 0.0;
}

GrayImage downsize(const GrayImage& img, int factor) {
    if (factor < 1) throw NumericError("downsize: factor must be >= 1");
    if (factor == 1) return img;
    GrayImage out(grid_dim(img.width, factor), grid_dim(img.height, factor));
    for (int oy = 0; oy < out.height; ++oy) {
        for (int ox = 0; ox < out.width; ++ox) {
            const int x0 = ox * factor;
            const int y0 = oy * factor;
            const int x1 = std::min(x0 + factor, img.width);
            const int y1 = std::min(y0 + factor, img.height);
            double sum = 0.0;
            for (int y = y0; y < y1; ++y) {
                for (int x = x0; x < x1; ++x) sum += img.at(x, y);
            }
            out.at(ox, oy) = sum / ((x1 - x0) * (y1 - y0));
        }
    }
    return out;
}

int resolve_downsize_factor(const GrayImage& img, const QualityConfig& cfg) {
    if (cfg.downsize_factor > 0) return cfg.downsize_factor;
    return std::max(img.width, img.height) > 300 ? 2 : 1;
}

QualityReport assess_fingerprint(const GrayImage& img, const QualityConfig& cfg) {
    if (img.width < 1 || img.height < 1) throw NumericError("assess_fingerprint: empty image");
    const int factor = resolve_downsize_factor(img, cfg);
    const GrayImage work = downsize(img, factor);

    const FilterBank bank(cfg.sigma1, cfg.sigma2, cfg.orders);
    const ComplexField z = orientation_tensor(work, cfg.sigma1);
    const auto responses = decompose(z, bank);
    const auto inhibited = inhibit(responses);
    const RealField total = total_symmetry(inhibited);

    QualityReport report;
    report.downsize_factor = factor;
    report.symmetry = block_average(total, cfg.block_size);

    // r averages the pairwise correlations of the inhibited magnitudes; with
    // two orders this is exactly the single coefficient r01.
    const std::size_t m = inhibited.size();
    BlockGrid corr(cfg.block_size, report.symmetry.cols, report.symmetry.rows);
    if (m >= 2) {
        std::vector<RealField> mags;
        mags.reserve(m);
        for (const auto& field : inhibited) mags.push_back(magnitude(field));
        int pairs = 0;
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i + 1; j < m; ++j) {
                const BlockGrid r = block_correlation(mags[i], mags[j], cfg.block_size);
                for (std::size_t p = 0; p < corr.size(); ++p) corr.values[p] += r.values[p];
                ++pairs;
            }
        }
        for (double& v : corr.values) v /= pairs;
    }
    report.correlation = corr;
    report.quality = block_quality(report.correlation, report.symmetry);
    report.interest = interest_mask(report.symmetry, cfg.interest_threshold);
    report.overall = overall_quality(report.quality, report.interest);
    return report;
}

}  // namespace symfuse
