#pragma once

// Independent reference implementations the tests compare against. These are
// deliberately naive: correctness over speed.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace oracle {

// textbook exponential recursion; only usable for |a|, |b| <= 8
inline int levenshtein_naive(std::string_view a, std::string_view b) {
    if (a.empty()) return static_cast<int>(b.size());
    if (b.empty()) return static_cast<int>(a.size());
    const int sub = levenshtein_naive(a.substr(1), b.substr(1)) + (a.front() == b.front() ? 0 : 1);
    const int del = levenshtein_naive(a.substr(1), b) + 1;
    const int ins = levenshtein_naive(a, b.substr(1)) + 1;
    return std::min({sub, del, ins});
}

inline double dot_naive(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double cosine_naive(std::span<const double> a, std::span<const double> b) {
    double na = 0.0;
    double nb = 0.0;
    for (double x : a) na += x * x;
    for (double x : b) nb += x * x;
    return dot_naive(a, b) / (std::sqrt(na) * std::sqrt(nb));
}

// full-scan top-k selection by (score, label); ascending == smallest first
template <typename Score>
std::vector<std::string> top_k_by(const std::vector<std::pair<std::string, Score>>& scored, int k,
                                  bool ascending) {
    std::vector<std::pair<std::string, Score>> rows = scored;
    std::sort(rows.begin(), rows.end(), [ascending](const auto& x, const auto& y) {
        if (x.second != y.second) return ascending ? x.second < y.second : x.second > y.second;
        return x.first < y.first;
    });
    std::vector<std::string> out;
    for (int i = 0; i < k && i < static_cast<int>(rows.size()); ++i) out.push_back(rows[static_cast<std::size_t>(i)].first);
    return out;
}

}  // namespace oracle
