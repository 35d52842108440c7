#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "npvq/dsp.hpp"

namespace npvq {

using FeatureVector = std::vector<double>;

enum class SplitMethod { StdDev, Hyperplane };
// MAE is the working distance throughout; Euclidean exists for comparison
// runs only and is never the default.
enum class DistanceKind { Mae, Euclidean };

inline constexpr double kSplitEpsilon = 0.1;
// Per-dimension spread used when a cluster has no variance to split along.
inline constexpr double kDegenerateSplitSpread = 1e-4;

struct LinearCodebook {
    std::vector<FeatureVector> centroids;
    int size_bits = 0;
    SplitMethod split_method = SplitMethod::Hyperplane;
    DistanceKind distance = DistanceKind::Mae;
    double training_distortion = 0.0;

    std::size_t size() const { return centroids.size(); }
};

struct QuantizationResult {
    std::size_t nearest_index = 0;
    double distortion = 0.0;
};

// (1/d) sum_i |a_i - b_i|
double distance_mae(const FeatureVector& a, const FeatureVector& b);
double distance_euclidean(const FeatureVector& a, const FeatureVector& b);
double vq_distance(const FeatureVector& a, const FeatureVector& b, DistanceKind kind);

// Nearest centroid; ties go to the lowest index.
QuantizationResult quantize(const FeatureVector& v, const LinearCodebook& cb);

// Nearest-centroid index for every vector.
std::vector<std::size_t> assign_clusters(const std::vector<FeatureVector>& data,
                                         const LinearCodebook& cb);

// Children centroid -/+ eps*sigma (per-dimension standard deviation of the
// cluster). A cluster without variance is split by a fixed small spread.
std::pair<FeatureVector, FeatureVector> split_stddev(const std::vector<FeatureVector>& cluster,
                                                     const FeatureVector& centroid);

// Children centroid -/+ eps*sqrt(lambda_max)*u along the dominant covariance
// eigenvector (power iteration). Falls back to split_stddev when the
// covariance is rank deficient.
std::pair<FeatureVector, FeatureVector> split_hyperplane(const std::vector<FeatureVector>& cluster,
                                                         const FeatureVector& centroid);

struct PowerIterationResult {
    double eigenvalue = 0.0;
    FeatureVector eigenvector;
};

// Dominant eigenpair of a symmetric PSD matrix (row-major, dim x dim);
// 100 iterations or relative eigenvalue change below 1e-10.
PowerIterationResult dominant_eigenpair(const std::vector<double>& matrix, std::size_t dim);

struct LloydResult {
    LinearCodebook codebook;
    double distortion = 0.0;
    int empty_cells_repaired = 0;
};

// One Lloyd pass: nearest-centroid assignment, then centroid re-estimation
// (component-wise median under MAE, mean under Euclidean — the distortion-
// optimal center for the respective distance, which keeps the reported
// distortion non-increasing from pass to pass). Empty cells are repaired by
// splitting the most populated cluster's centroid.
LloydResult lloyd_iterate(const LinearCodebook& cb, const std::vector<FeatureVector>& data);

// Splitting algorithm: start from the global mean, double the codebook and
// refine with Lloyd passes until 2^size_bits centroids.
LinearCodebook train_codebook(const std::vector<FeatureVector>& data, int size_bits,
                              SplitMethod split_method,
                              DistanceKind distance = DistanceKind::Mae);

} // namespace npvq
