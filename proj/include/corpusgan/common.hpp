#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace corpusgan {

class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// All randomness goes through this wrapper. Distributions are hand-rolled on
// top of mt19937_64 output so results do not depend on the standard library's
// (implementation-defined) distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // [0, 1), 53 bits of precision
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // [0, n)
  std::size_t uniform_index(std::size_t n) {
    return static_cast<std::size_t>(uniform01() * static_cast<double>(n)) % n;
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_index(i)]);
    }
  }

  // Exact state round-trip, used by resumable training checkpoints.
  std::string save_state() const {
    std::ostringstream os;
    os << engine_;
    return os.str();
  }
  void load_state(const std::string& s) {
    std::istringstream is(s);
    is >> engine_;
    if (!is) throw error("Rng: malformed state string");
  }

 private:
  std::mt19937_64 engine_;
};

// Per-corpus sampling without replacement: a shuffled index queue that
// reshuffles whenever fewer than a full batch remains.
struct BatchQueue {
  std::vector<int> order;
  std::size_t cursor = 0;

  explicit BatchQueue(int n) : order(n) {
    for (int i = 0; i < n; i++) order[i] = i;
    cursor = order.size();  // force a shuffle on first draw
  }

  std::vector<int> draw(int batch, Rng& rng) {
    const int take = std::min<int>(batch, static_cast<int>(order.size()));
    if (cursor + take > order.size()) {
      rng.shuffle(order);
      cursor = 0;
    }
    std::vector<int> out(order.begin() + cursor, order.begin() + cursor + take);
    cursor += take;
    return out;
  }
};

inline std::uint64_t fnv1a64(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string& s) {
  return fnv1a64(s.data(), s.size());
}

inline std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// %.17g round-trips IEEE754 doubles exactly; every persisted float uses this
// so reruns and checkpoint resumes stay bit-identical.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

std::vector<std::string> split_ws(const std::string& line);
std::vector<std::string> split_char(const std::string& line, char delim);

}  // namespace corpusgan
