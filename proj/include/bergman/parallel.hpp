#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace bergman {

// Neumaier-compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) comp += (sum - t) + x;
    else comp += (x - t) + sum;
    sum = t;
  }
  void add(const CompensatedSum& o) {
    add(o.sum);
    add(o.comp);
  }
  double value() const { return sum + comp; }
};

// BERGMAN_THREADS overrides; defaults to the hardware count.
inline unsigned thread_count() {
  if (const char* env = std::getenv("BERGMAN_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs body(chunk, begin, end) over fixed-size chunks of [0, n). Chunk
// boundaries never depend on the thread count; the first exception (by chunk
// index) is rethrown.
template <class Body>
void for_chunks(std::size_t n, std::size_t chunk, Body&& body) {
  if (n == 0) return;
  chunk = std::max<std::size_t>(chunk, 1);
  const std::size_t chunks = (n + chunk - 1) / chunk;
  const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(thread_count(), chunks));
  if (threads <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) body(c, c * chunk, std::min(n, (c + 1) * chunk));
    return;
  }
  std::vector<std::exception_ptr> errors(chunks);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t c = w; c < chunks; c += threads) {
        try {
          body(c, c * chunk, std::min(n, (c + 1) * chunk));
        } catch (...) {
          errors[c] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Sum of term(i) over [0, n): compensated within fixed chunks, chunks merged
// in index order. Bitwise independent of the thread count.
template <class Term>
double ordered_sum(std::size_t n, Term&& term, std::size_t chunk = 1024) {
  const std::size_t chunks = n == 0 ? 0 : (n + chunk - 1) / chunk;
  std::vector<CompensatedSum> partial(chunks);
  for_chunks(n, chunk, [&](std::size_t c, std::size_t b, std::size_t e) {
    CompensatedSum s;
    for (std::size_t i = b; i < e; ++i) s.add(term(i));
    partial[c] = s;
  });
  CompensatedSum total;
  for (const auto& p : partial) total.add(p);
  return total.value();
}

// out[i] = fn(i), evaluated in parallel.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, Fn&& fn, std::size_t chunk = 256) {
  std::vector<T> out(n);
  for_chunks(n, chunk, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) out[i] = fn(i);
  });
  return out;
}

}  // namespace bergman
