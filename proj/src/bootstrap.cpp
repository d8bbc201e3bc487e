#include "lobmm/bootstrap.hpp"

#include <cmath>
#include <stdexcept>

namespace lobmm {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t mix_key(std::uint64_t seed, std::uint64_t replicate, std::uint64_t day) {
    std::uint64_t s = seed;
    std::uint64_t h = splitmix64(s);
    s ^= replicate * 0xff51afd7ed558ccdULL;
    h ^= splitmix64(s);
    s ^= day * 0xc4ceb9fe1a85ec53ULL;
    h ^= splitmix64(s);
    return h;
}

}  // namespace

SplitRng::SplitRng(std::uint64_t seed, std::uint64_t replicate, std::uint64_t day)
    : state_(mix_key(seed, replicate, day)) {}

std::uint64_t SplitRng::next_u64() { return splitmix64(state_); }

double SplitRng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t SplitRng::next_below(std::uint64_t n) {
    // rejection sampling over the largest multiple of n
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do {
        v = next_u64();
    } while (v >= limit);
    return v % n;
}

double SplitRng::next_gaussian() {
    double u, v, s;
    do {
        u = 2.0 * next_double() - 1.0;
        v = 2.0 * next_double() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    return u * std::sqrt(-2.0 * std::log(s) / s);
}

double SplitRng::next_exponential(double rate) {
    double u;
    do {
        u = next_double();
    } while (u == 0.0);
    return -std::log(u) / rate;
}

int SplitRng::next_poisson(double mean) {
    // Knuth; intensities here are small per step
    const double threshold = std::exp(-mean);
    int k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= next_double();
    } while (p > threshold);
    return k - 1;
}

DayPartition resample_day(const DayPartition& partition, SplitRng& rng) {
    if (partition.orders.empty()) throw std::invalid_argument("resample_day: empty partition");
    const std::size_t n = partition.orders.size();
    DayPartition out;
    out.day = partition.day;
    out.orders.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.orders.push_back(partition.orders[rng.next_below(n)]);
    std::sort(out.orders.begin(), out.orders.end(), [](const OrderRecord& a, const OrderRecord& b) {
        return std::tie(a.timestamp, a.id) < std::tie(b.timestamp, b.id);
    });
    for (std::size_t i = 0; i < n; ++i) out.orders[i].id = static_cast<std::int64_t>(i);
    return out;
}

}  // namespace lobmm
