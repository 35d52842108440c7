#include "npvq/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace npvq {

namespace {

void check_same_dim(const FeatureVector& a, const FeatureVector& b) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("distance: vectors must share a nonzero dimension");
}

FeatureVector cluster_mean(const std::vector<FeatureVector>& cluster) {
    const std::size_t dim = cluster.front().size();
    FeatureVector mean(dim, 0.0);
    for (const FeatureVector& v : cluster)
        for (std::size_t d = 0; d < dim; ++d) mean[d] += v[d];
    for (double& m : mean) m /= static_cast<double>(cluster.size());
    return mean;
}

FeatureVector cluster_stddev(const std::vector<FeatureVector>& cluster) {
    const std::size_t dim = cluster.front().size();
    const FeatureVector mean = cluster_mean(cluster);
    FeatureVector var(dim, 0.0);
    for (const FeatureVector& v : cluster)
        for (std::size_t d = 0; d < dim; ++d) {
            const double diff = v[d] - mean[d];
            var[d] += diff * diff;
        }
    for (double& s : var) s = std::sqrt(s / static_cast<double>(cluster.size()));
    return var;
}

// Distortion-optimal center of a cluster for the given distance: the
// component-wise median under MAE (L1), the mean under Euclidean.
FeatureVector cluster_center(const std::vector<FeatureVector>& cluster, DistanceKind kind) {
    if (kind == DistanceKind::Euclidean) return cluster_mean(cluster);
    const std::size_t dim = cluster.front().size();
    FeatureVector center(dim, 0.0);
    std::vector<double> column(cluster.size());
    for (std::size_t d = 0; d < dim; ++d) {
        for (std::size_t i = 0; i < cluster.size(); ++i) column[i] = cluster[i][d];
        std::sort(column.begin(), column.end());
        const std::size_t n = column.size();
        center[d] = (n % 2 == 1) ? column[n / 2] : 0.5 * (column[n / 2 - 1] + column[n / 2]);
    }
    return center;
}

// Upper split child for a centroid given its cluster; the other child stays
// at the centroid itself. Keeping one child in place means a split can only
// add representation, so distortion never rises across doubling or
// empty-cell repair.
FeatureVector split_offset_child(const std::vector<FeatureVector>& cluster,
                                 const FeatureVector& centroid, SplitMethod method) {
    if (cluster.empty()) {
        FeatureVector hi = centroid;
        for (double& x : hi) x += kSplitEpsilon * kDegenerateSplitSpread;
        return hi;
    }
    const auto [lo, hi] = (method == SplitMethod::Hyperplane && cluster.size() >= 2)
                              ? split_hyperplane(cluster, centroid)
                              : split_stddev(cluster, centroid);
    (void)lo;
    return hi;
}

} // namespace

double distance_mae(const FeatureVector& a, const FeatureVector& b) {
    check_same_dim(a, b);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::fabs(a[i] - b[i]);
    return acc / static_cast<double>(a.size());
}

double distance_euclidean(const FeatureVector& a, const FeatureVector& b) {
    check_same_dim(a, b);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

double vq_distance(const FeatureVector& a, const FeatureVector& b, DistanceKind kind) {
    return kind == DistanceKind::Mae ? distance_mae(a, b) : distance_euclidean(a, b);
}

QuantizationResult quantize(const FeatureVector& v, const LinearCodebook& cb) {
    if (cb.centroids.empty())
        throw std::invalid_argument("quantize: codebook is empty");
    QuantizationResult best{0, std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < cb.centroids.size(); ++i) {
        const double d = vq_distance(v, cb.centroids[i], cb.distance);
        if (d < best.distortion) {
            best.nearest_index = i;
            best.distortion = d;
        }
    }
    return best;
}

std::vector<std::size_t> assign_clusters(const std::vector<FeatureVector>& data,
                                         const LinearCodebook& cb) {
    std::vector<std::size_t> assignment(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        assignment[i] = quantize(data[i], cb).nearest_index;
    return assignment;
}

std::pair<FeatureVector, FeatureVector> split_stddev(const std::vector<FeatureVector>& cluster,
                                                     const FeatureVector& centroid) {
    if (cluster.empty())
        throw std::invalid_argument("split_stddev: cluster is empty");
    const std::size_t dim = centroid.size();
    FeatureVector sigma = cluster.size() >= 2 ? cluster_stddev(cluster)
                                              : FeatureVector(dim, 0.0);
    double total = 0.0;
    for (double s : sigma) total += s;
    if (total < 1e-12)
        sigma.assign(dim, kDegenerateSplitSpread);

    FeatureVector lo = centroid, hi = centroid;
    for (std::size_t d = 0; d < dim; ++d) {
        const double delta = kSplitEpsilon * sigma[d];
        lo[d] -= delta;
        hi[d] += delta;
    }
    return {lo, hi};
}

PowerIterationResult dominant_eigenpair(const std::vector<double>& matrix, std::size_t dim) {
    if (matrix.size() != dim * dim || dim == 0)
        throw std::invalid_argument("dominant_eigenpair: matrix must be dim x dim");

    // Start from the row with the largest norm; deterministic and never
    // orthogonal to the dominant eigenvector for the covariances seen here.
    FeatureVector v(dim, 0.0);
    double best_norm = -1.0;
    for (std::size_t r = 0; r < dim; ++r) {
        double norm = 0.0;
        for (std::size_t c = 0; c < dim; ++c) norm += matrix[r * dim + c] * matrix[r * dim + c];
        if (norm > best_norm) {
            best_norm = norm;
            for (std::size_t c = 0; c < dim; ++c) v[c] = matrix[r * dim + c];
        }
    }
    double vnorm = 0.0;
    for (double x : v) vnorm += x * x;
    if (vnorm <= 0.0) return {0.0, FeatureVector(dim, 0.0)};
    vnorm = std::sqrt(vnorm);
    for (double& x : v) x /= vnorm;

    double lambda = 0.0;
    FeatureVector w(dim, 0.0);
    for (int iter = 0; iter < 100; ++iter) {
        for (std::size_t r = 0; r < dim; ++r) {
            double acc = 0.0;
            for (std::size_t c = 0; c < dim; ++c) acc += matrix[r * dim + c] * v[c];
            w[r] = acc;
        }
        double wnorm = 0.0;
        for (double x : w) wnorm += x * x;
        wnorm = std::sqrt(wnorm);
        if (wnorm <= 0.0) return {0.0, v};
        for (std::size_t d = 0; d < dim; ++d) v[d] = w[d] / wnorm;
        const double prev = lambda;
        lambda = wnorm; // Rayleigh quotient of the normalized iterate, PSD case
        if (iter > 0 && std::fabs(lambda - prev) <= 1e-10 * std::max(lambda, 1e-300)) break;
    }

    // Fix the sign: largest-magnitude component positive.
    std::size_t arg = 0;
    for (std::size_t d = 1; d < dim; ++d)
        if (std::fabs(v[d]) > std::fabs(v[arg])) arg = d;
    if (v[arg] < 0.0)
        for (double& x : v) x = -x;
    return {lambda, v};
}

std::pair<FeatureVector, FeatureVector> split_hyperplane(const std::vector<FeatureVector>& cluster,
                                                         const FeatureVector& centroid) {
    if (cluster.size() < 2)
        return split_stddev(cluster, centroid);

    const std::size_t dim = centroid.size();
    const FeatureVector mean = cluster_mean(cluster);
    std::vector<double> cov(dim * dim, 0.0);
    for (const FeatureVector& v : cluster)
        for (std::size_t r = 0; r < dim; ++r)
            for (std::size_t c = r; c < dim; ++c)
                cov[r * dim + c] += (v[r] - mean[r]) * (v[c] - mean[c]);
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = r; c < dim; ++c) {
            cov[r * dim + c] /= static_cast<double>(cluster.size());
            cov[c * dim + r] = cov[r * dim + c];
        }

    double trace = 0.0;
    for (std::size_t d = 0; d < dim; ++d) trace += cov[d * dim + d];
    if (trace <= 1e-18)
        return split_stddev(cluster, centroid);

    const PowerIterationResult eig = dominant_eigenpair(cov, dim);
    if (eig.eigenvalue <= 1e-12 * std::max(1.0, trace))
        return split_stddev(cluster, centroid);

    const double scale = kSplitEpsilon * std::sqrt(eig.eigenvalue);
    FeatureVector lo = centroid, hi = centroid;
    for (std::size_t d = 0; d < dim; ++d) {
        lo[d] -= scale * eig.eigenvector[d];
        hi[d] += scale * eig.eigenvector[d];
    }
    return {lo, hi};
}

LloydResult lloyd_iterate(const LinearCodebook& cb, const std::vector<FeatureVector>& data) {
    if (data.empty())
        throw std::invalid_argument("lloyd_iterate: data is empty");
    if (cb.centroids.empty())
        throw std::invalid_argument("lloyd_iterate: codebook is empty");

    LloydResult result;
    result.codebook = cb;

    const std::vector<std::size_t> assignment = assign_clusters(data, cb);
    std::vector<std::vector<FeatureVector>> members(cb.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        members[assignment[i]].push_back(data[i]);

    for (std::size_t c = 0; c < members.size(); ++c)
        if (!members[c].empty())
            result.codebook.centroids[c] = cluster_center(members[c], cb.distance);

    double acc = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i)
        acc += vq_distance(data[i], result.codebook.centroids[assignment[i]], cb.distance);
    result.distortion = acc / static_cast<double>(data.size());

    // Empty-cell repair: give the dead slot a child of the busiest cluster.
    // The donor centroid itself stays, so the next assignment can only get
    // cheaper.
    for (std::size_t c = 0; c < members.size(); ++c) {
        if (!members[c].empty()) continue;
        std::size_t donor = 0;
        for (std::size_t j = 1; j < members.size(); ++j)
            if (members[j].size() > members[donor].size()) donor = j;
        if (members[donor].empty()) continue; // nothing to donate
        result.codebook.centroids[c] = split_offset_child(
            members[donor], result.codebook.centroids[donor], cb.split_method);
        ++result.empty_cells_repaired;
    }
    return result;
}

LinearCodebook train_codebook(const std::vector<FeatureVector>& data, int size_bits,
                              SplitMethod split_method, DistanceKind distance) {
    if (size_bits < 0 || size_bits > 20)
        throw std::invalid_argument("train_codebook: size_bits out of range");
    const std::size_t target = std::size_t{1} << size_bits;
    if (data.size() < target)
        throw std::invalid_argument("train_codebook: need at least " + std::to_string(target) +
                                    " training vectors for size_bits " +
                                    std::to_string(size_bits) + ", got " +
                                    std::to_string(data.size()));

    LinearCodebook cb;
    cb.size_bits = size_bits;
    cb.split_method = split_method;
    cb.distance = distance;
    cb.centroids = {cluster_mean(data)};

    double distortion = 0.0;
    for (const FeatureVector& v : data)
        distortion += vq_distance(v, cb.centroids[0], distance);
    distortion /= static_cast<double>(data.size());

    const auto refine = [&](LinearCodebook& book) {
        double prev = std::numeric_limits<double>::infinity();
        for (int iter = 0; iter < 50; ++iter) {
            LloydResult r = lloyd_iterate(book, data);
            book = std::move(r.codebook);
            distortion = r.distortion;
            if (prev < std::numeric_limits<double>::infinity()) {
                const double rel = (prev - distortion) / std::max(prev, 1e-300);
                if (r.empty_cells_repaired == 0 && rel < 1e-4) break;
            }
            prev = distortion;
        }
    };

    while (cb.size() < target) {
        const double stage_distortion = distortion;
        const std::vector<std::size_t> assignment = assign_clusters(data, cb);
        std::vector<std::vector<FeatureVector>> members(cb.size());
        for (std::size_t i = 0; i < data.size(); ++i)
            members[assignment[i]].push_back(data[i]);

        // Split every centroid into the two method children.
        LinearCodebook split_cb = cb;
        split_cb.centroids.clear();
        split_cb.centroids.reserve(cb.size() * 2);
        for (std::size_t c = 0; c < cb.size(); ++c) {
            const auto [lo, hi] =
                members[c].empty()
                    ? std::pair{cb.centroids[c],
                                split_offset_child(members[c], cb.centroids[c], split_method)}
                    : (split_method == SplitMethod::Hyperplane
                           ? split_hyperplane(members[c], cb.centroids[c])
                           : split_stddev(members[c], cb.centroids[c]));
            split_cb.centroids.push_back(lo);
            split_cb.centroids.push_back(hi);
        }
        refine(split_cb);

        if (distortion <= stage_distortion + 1e-12) {
            cb = std::move(split_cb);
            continue;
        }
        // Rare safeguard: the perturbed children refined into something
        // worse than the parent codebook. Duplicating each centroid keeps
        // the parent distortion exactly; the duplicates starve and the
        // empty-cell repair grows real cells from there, so this path can
        // only descend.
        LinearCodebook dup_cb = cb;
        dup_cb.centroids.clear();
        for (std::size_t c = 0; c < cb.size(); ++c) {
            dup_cb.centroids.push_back(cb.centroids[c]);
            dup_cb.centroids.push_back(cb.centroids[c]);
        }
        refine(dup_cb);
        cb = std::move(dup_cb);
    }

    // Make sure every cell is populated (duplicates starve to empty cells
    // under lowest-index tie-breaking and get repaired here too).
    for (int attempt = 0; attempt < 32; ++attempt) {
        const std::vector<std::size_t> assignment = assign_clusters(data, cb);
        std::vector<std::size_t> counts(cb.size(), 0);
        for (std::size_t a : assignment) ++counts[a];
        if (std::find(counts.begin(), counts.end(), std::size_t{0}) == counts.end()) break;
        LloydResult r = lloyd_iterate(cb, data);
        cb = std::move(r.codebook);
        distortion = r.distortion;
    }

    cb.training_distortion = distortion;
    return cb;
}

} // namespace npvq
