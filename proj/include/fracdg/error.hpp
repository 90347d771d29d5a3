#pragma once

#include <stdexcept>
#include <string>

namespace fracdg {

class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// A region holds too few cells for the requested quantity.
class degenerate_region_error : public error {
public:
    using error::error;
};

// Exterior data grows too fast for the tail integral to converge.
class divergent_tail_error : public error {
public:
    using error::error;
};

// The requested operation is undefined for the given variant
// (e.g. differentiating a jump potential).
class unsupported_operation_error : public error {
public:
    using error::error;
};

// A lemma or theorem hypothesis fails on the supplied data.
class hypothesis_violation_error : public error {
public:
    using error::error;
};

// The computation cannot produce a finite answer (unbounded energy,
// runaway coordinate search, non-convergent exterior sums).
class divergence_error : public error {
public:
    using error::error;
};

class config_error : public error {
public:
    using error::error;
};

} // namespace fracdg
