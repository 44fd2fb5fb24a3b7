#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace germ {

// Base of all library errors. Subclasses distinguish "bad input" from
// "hypothesis of a theorem not satisfied" so the CLI can map exit codes.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed files, mismatched variable counts, bad options.  Exit code 3.
struct InputError : Error {
    explicit InputError(const std::string& msg) : Error(msg) {}
};

// A value needed by an exact-mode computation does not lie in the
// coefficient field (square root, cube root, pencil eigenvalue).
// Float mode handles these inputs.  Exit code 2.
struct FieldError : Error {
    explicit FieldError(const std::string& msg) : Error(msg) {}
};

// Genericity hypothesis failed; carries a human-readable witness.
struct NotGeneric : Error {
    std::string witness;
    NotGeneric(const std::string& msg, std::string w = {})
        : Error(msg + (w.empty() ? "" : " [witness: " + w + "]")), witness(std::move(w)) {}
};

// A pencil of quadratic forms has a block of size >= 2.
struct NotDiagonalizable : Error {
    explicit NotDiagonalizable(const std::string& msg) : Error(msg) {}
};

struct NotMorse : Error {
    explicit NotMorse(const std::string& msg) : Error(msg) {}
};

// Tangency-curve lift obstructed.  Cannot distinguish a non-generic input
// from a truncation order that is too small; both possibilities are reported.
struct LiftFailure : Error {
    int degree;
    LiftFailure(const std::string& msg, int d)
        : Error(msg + " (obstructed at degree " + std::to_string(d) +
                "; input may be non-generic or the jet order too small)"),
          degree(d) {}
};

// Ideal-membership decomposition obstructed at a degree.
struct NotInIdeal : Error {
    int degree;
    std::string residual;
    NotInIdeal(int d, std::string res)
        : Error("not in ideal: obstruction at degree " + std::to_string(d) +
                ", residual " + res),
          degree(d), residual(std::move(res)) {}
};

// Preconditions of the path-conjugation engine failed.
struct HypothesisFailed : Error {
    enum class Which { IdealMismatch, NotInIdeal, RegularWithoutVanishing, JetMismatch, Other };
    Which which;
    HypothesisFailed(Which w, const std::string& msg) : Error(msg), which(w) {}
};

struct NotAFold : Error {
    explicit NotAFold(const std::string& msg) : Error(msg) {}
};

} // namespace germ
