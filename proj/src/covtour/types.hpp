#ifndef COVTOUR_TYPES_HPP_
#define COVTOUR_TYPES_HPP_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace covtour {

using NodeId = std::int32_t;

// Quantities (demands, loads, capacities) are integer hundredths of a
// canonical unit so that split pieces, capacity checks and conservation sums
// are exact integer arithmetic.
using Quantity = std::int64_t;
inline constexpr Quantity kQuantityScale = 100;

inline double quantity_to_units(Quantity q) {
    return static_cast<double>(q) / static_cast<double>(kQuantityScale);
}

class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

class UnreachableError : public std::runtime_error {
public:
    UnreachableError(NodeId from, NodeId to)
        : std::runtime_error("no directed path from node " + std::to_string(from) + " to node " + std::to_string(to)),
          from(from),
          to(to) {}
    NodeId from;
    NodeId to;
};

class UncoverableDemandNodeError : public std::runtime_error {
public:
    explicit UncoverableDemandNodeError(NodeId node)
        : std::runtime_error("demand node " + std::to_string(node) + " has no candidate stop within reach"), node(node) {}
    NodeId node;
};

class UncoveredError : public std::runtime_error {
public:
    explicit UncoveredError(NodeId node)
        : std::runtime_error("demand node " + std::to_string(node) + " is not covered by the visited stops"), node(node) {}
    NodeId node;
};

class DecodeError : public std::runtime_error {
public:
    explicit DecodeError(const std::string& what) : std::runtime_error(what) {}
};

class NotEulerianError : public DecodeError {
public:
    explicit NotEulerianError(int vehicle)
        : DecodeError("arc multiset of vehicle " + std::to_string(vehicle) + " violates in-degree = out-degree"),
          vehicle(vehicle) {}
    int vehicle;
};

class DisconnectedError : public DecodeError {
public:
    DisconnectedError(int vehicle, NodeId stop)
        : DecodeError("vehicle " + std::to_string(vehicle) + " serves stop " + std::to_string(stop) +
                      " outside the depot component"),
          vehicle(vehicle),
          stop(stop) {}
    int vehicle;
    NodeId stop;
};

class LimitExceededError : public std::runtime_error {
public:
    explicit LimitExceededError(const std::string& what) : std::runtime_error(what) {}
};

class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

class InvalidParamsError : public std::runtime_error {
public:
    explicit InvalidParamsError(const std::string& what) : std::runtime_error(what) {}
};

// Deterministic random source. The engine sequence is fixed by the standard
// and the value mappings below avoid the implementation-defined std
// distributions, so identical seeds give identical runs on any platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform draw from [0, n). n must be positive.
    std::size_t uniform_index(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

    // Uniform draw from [lo, hi], inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool coin() { return (next_u64() & 1u) != 0; }

private:
    std::mt19937_64 engine_;
};

}  // namespace covtour

#endif
