#include "uosr/knn.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

namespace uosr {

namespace {

// Queries are processed in tiles so the train bank streams through the cache
// once per tile instead of once per query.
constexpr std::size_t kQueryTile = 32;

unsigned resolve_threads(unsigned n_threads) {
    if (n_threads != 0) return n_threads;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

double dot_ptr(const double* __restrict a, const double* __restrict b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

// Exact K-th largest (multiset semantics). For small k a threshold scan beats
// nth_element: most candidates fail the single compare against the current
// K-th value. Selection strategy never changes the result.
double kth_largest(const std::vector<double>& sims, std::size_t k) {
    if (k > 16) {
        std::vector<double> copy(sims);
        std::nth_element(copy.begin(), copy.begin() + static_cast<std::ptrdiff_t>(k - 1),
                         copy.end(), std::greater<double>());
        return copy[k - 1];
    }
    double top[16];  // ascending; top[0] is the running K-th largest
    std::partial_sort_copy(sims.begin(), sims.begin() + static_cast<std::ptrdiff_t>(k),
                           top, top + k, std::less<double>());
    for (std::size_t i = k; i < sims.size(); ++i) {
        double v = sims[i];
        if (v <= top[0]) continue;
        std::size_t pos = 1;
        while (pos < k && top[pos] < v) {
            top[pos - 1] = top[pos];
            ++pos;
        }
        top[pos - 1] = v;
    }
    return top[0];
}

double norm_checked(std::span<const double> row, const char* what) {
    double n = std::sqrt(fixed_order_dot(row, row));
    if (n == 0.0) raise(errc::zero_vector, std::string(what) + " has zero norm");
    return n;
}

void check_dims(std::size_t query_cols, const SimilarityBank& bank) {
    if (query_cols != bank.cols())
        raise(errc::dim_mismatch, "query dim " + std::to_string(query_cols) + " vs bank dim " +
                                      std::to_string(bank.cols()));
}

std::size_t clamp_k(std::size_t k, const SimilarityBank& bank) {
    if (k < 1) raise(errc::k_out_of_range, "k must be >= 1");
    return std::min(k, bank.rows());
}

// Unit-normalized copy of every row; similarities become plain dot products.
FeatureMatrix normalize_rows(const FeatureMatrix& m, const char* what) {
    FeatureMatrix out = m;
    for (std::size_t r = 0; r < out.rows; ++r) {
        double inv = 1.0 / norm_checked(out.row(r), what);
        double* p = out.data.data() + r * out.cols;
        for (std::size_t j = 0; j < out.cols; ++j) p[j] *= inv;
    }
    return out;
}

// Runs fn(query_index, sims_over_bank) for every query row, tiled and
// optionally threaded. Outputs are written by query index only, which keeps
// results identical at any thread count.
template <typename Fn>
void for_each_query(const FeatureMatrix& queries, const SimilarityBank& bank,
                    unsigned n_threads, Fn fn) {
    check_dims(queries.cols, bank);
    FeatureMatrix unit_queries = normalize_rows(queries, "query");

    std::size_t dim = queries.cols;
    std::size_t n_tiles = (queries.rows + kQueryTile - 1) / kQueryTile;
    std::atomic<std::size_t> next_tile{0};

    auto worker = [&]() {
        std::vector<std::vector<double>> sims(kQueryTile,
                                              std::vector<double>(bank.rows()));
        while (true) {
            std::size_t tile = next_tile.fetch_add(1);
            if (tile >= n_tiles) break;
            std::size_t begin = tile * kQueryTile;
            std::size_t end = std::min(begin + kQueryTile, queries.rows);
            for (std::size_t r = 0; r < bank.rows(); ++r) {
                const double* bank_row = bank.unit_row(r).data();
                for (std::size_t q = begin; q < end; ++q)
                    sims[q - begin][r] =
                        dot_ptr(unit_queries.data.data() + q * dim, bank_row, dim);
            }
            for (std::size_t q = begin; q < end; ++q) fn(q, sims[q - begin]);
        }
    };

    unsigned workers = std::min<unsigned>(resolve_threads(n_threads),
                                          static_cast<unsigned>(std::max<std::size_t>(n_tiles, 1)));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
}

}  // namespace

double fixed_order_dot(std::span<const double> a, std::span<const double> b) {
    return dot_ptr(a.data(), b.data(), a.size());
}

SimilarityBank::SimilarityBank(FeatureMatrix features) {
    if (features.rows < 1 || features.cols < 1)
        raise(errc::empty_input, "similarity bank needs at least one row");
    norms_.reserve(features.rows);
    for (std::size_t r = 0; r < features.rows; ++r)
        norms_.push_back(norm_checked(features.row(r),
                                      ("bank row " + std::to_string(r)).c_str()));
    features_ = normalize_rows(features, "bank row");
}

double cosine_similarity(std::span<const double> query, double query_norm,
                         const SimilarityBank& bank, std::size_t r) {
    return fixed_order_dot(query, bank.unit_row(r)) / query_norm;
}

double topk_similarity(std::span<const double> query, const SimilarityBank& bank,
                       std::size_t k) {
    check_dims(query.size(), bank);
    if (k < 1 || k > bank.rows())
        raise(errc::k_out_of_range, "k = " + std::to_string(k) + " outside [1, " +
                                        std::to_string(bank.rows()) + "]");
    double qnorm = norm_checked(query, "query");
    std::vector<double> sims(bank.rows());
    for (std::size_t r = 0; r < bank.rows(); ++r)
        sims[r] = cosine_similarity(query, qnorm, bank, r);
    return kth_largest(sims, k);
}

ScoreVector knn_score(const FeatureMatrix& test, const SimilarityBank& train_bank,
                      KnnParams p, unsigned n_threads) {
    std::size_t k_eff = clamp_k(p.k, train_bank);
    ScoreVector out;
    out.scorer_id = "knn";
    out.params = {{"k", static_cast<double>(p.k)}, {"k_eff", static_cast<double>(k_eff)}};
    out.scores.resize(test.rows);
    for_each_query(test, train_bank, n_threads,
                   [&](std::size_t q, const std::vector<double>& sims) {
                       out.scores[q] = 1.0 - kth_largest(sims, k_eff);
                   });
    return out;
}

ScoreVector fsknn_score(const FeatureMatrix& test, const SimilarityBank& train_bank,
                        const SimilarityBank& ref_bank, KnnParams p, unsigned n_threads) {
    if (train_bank.cols() != ref_bank.cols())
        raise(errc::dim_mismatch, "train bank dim " + std::to_string(train_bank.cols()) +
                                      " vs reference bank dim " +
                                      std::to_string(ref_bank.cols()));
    std::size_t k_train = clamp_k(p.k, train_bank);
    std::size_t k_ref = clamp_k(p.k, ref_bank);
    ScoreVector out;
    out.scorer_id = "fsknn";
    out.params = {{"k", static_cast<double>(p.k)},
                  {"k_eff_train", static_cast<double>(k_train)},
                  {"k_eff_ref", static_cast<double>(k_ref)}};
    out.scores.resize(test.rows);

    // Reference banks are small (shots x classes); one pass each, same kernel
    // as the train side so the two similarity terms stay bit-consistent.
    std::vector<double> ref_term(test.rows);
    for_each_query(test, ref_bank, n_threads,
                   [&](std::size_t q, const std::vector<double>& sims) {
                       ref_term[q] = kth_largest(sims, k_ref);
                   });
    for_each_query(test, train_bank, n_threads,
                   [&](std::size_t q, const std::vector<double>& sims) {
                       out.scores[q] = 1.0 - kth_largest(sims, k_train) + ref_term[q];
                   });
    return out;
}

}  // namespace uosr
