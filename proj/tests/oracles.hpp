#pragma once

// Independent reference implementations used to check the optimized code.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>
#include <string>
#include <tuple>
#include <vector>

namespace coedit::testing {

/// Full-matrix textbook edit distance over arbitrary element sequences.
template <typename Seq>
std::int64_t textbook_levenshtein(const Seq& a, const Seq& b) {
  std::vector<std::vector<std::int64_t>> d(a.size() + 1, std::vector<std::int64_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = static_cast<std::int64_t>(i);
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = static_cast<std::int64_t>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
  }
  return d[a.size()][b.size()];
}

/// Shortest path over the unclamped keystroke state graph
/// (i, j, cursor_dis, deleting) using the seven operations directly.
/// Dial's algorithm: edge costs are small non-negative integers.
class KeystrokeOracle {
 public:
  std::int64_t operator()(const std::string& input, const std::string& output, int jump, int init) {
    const int n = static_cast<int>(input.size());
    const int m = static_cast<int>(output.size());
    const int max_c = init + m + 1;
    const auto index = [&](int i, int j, int c, int d) { return ((i * (m + 1) + j) * (max_c + 1) + c) * 2 + d; };
    const std::size_t states = static_cast<std::size_t>((n + 1) * (m + 1) * (max_c + 1) * 2);
    dist_.assign(states, kInf);
    const int max_edge = std::max(jump, 1);
    buckets_.assign(static_cast<std::size_t>(max_edge + 1), {});

    std::int64_t current = 0;
    std::size_t pending = 0;
    auto push = [&](int i, int j, int c, int d, std::int64_t cost) {
      const auto k = static_cast<std::size_t>(index(i, j, c, d));
      if (cost < dist_[k]) {
        dist_[k] = cost;
        buckets_[static_cast<std::size_t>(cost % (max_edge + 1))].emplace_back(i, j, c, d);
        ++pending;
      }
    };
    push(n, m, init, 0, 0);
    for (; pending > 0; ++current) {
      auto& bucket = buckets_[static_cast<std::size_t>(current % (max_edge + 1))];
      while (!bucket.empty()) {
        auto [i, j, c, d] = bucket.back();
        bucket.pop_back();
        --pending;
        const std::int64_t cost = dist_[static_cast<std::size_t>(index(i, j, c, d))];
        if (cost != current) continue;
        if (i == 0 && j == 0 && d == 0) return cost;
        // M
        if (!d && i > 0 && j > 0 && input[static_cast<std::size_t>(n - i)] == output[static_cast<std::size_t>(m - j)]) {
          push(i - 1, j - 1, c + 1, 0, cost);
        }
        // C
        push(i, j, 0, d, cost + std::min(c, jump));
        if (c == 0 && !d) {
          if (i > 0) push(i - 1, j, 0, 0, cost + 1);  // D
          if (j > 0) push(i, j - 1, 0, 0, cost + 1);  // A
          push(i, j, 0, 1, cost + 1);                 // S
        }
        if (d && i > 0) push(i - 1, j, c, 1, cost);  // K
        if (d && c == 0) push(i, j, c, 0, cost + 1);  // E
      }
    }
    return kInf;
  }

 private:
  static constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::int64_t> dist_;
  std::vector<std::vector<std::tuple<int, int, int, int>>> buckets_;
};

}  // namespace coedit::testing
