#pragma once

#include <cstdint>

namespace setix {

/// Operation counters used for empirical cost checks.
///
/// Counters are thread-local so that the pure kernels and concurrent readers
/// never race on them. Take a snapshot before and after a region of interest
/// and subtract, or use CounterScope.
struct OpCounters {
    std::uint64_t word_ops = 0;           ///< word-level kernel operations (merge, duplicate scan, insert/delete)
    std::uint64_t fingerprint_hits = 0;   ///< distinct duplicated fingerprints inspected during queries
    std::uint64_t false_positives = 0;    ///< duplicated fingerprints with no common element
    std::uint64_t verify_probes = 0;      ///< element comparisons while filtering fingerprint hits
    std::uint64_t membership_probes = 0;  ///< hash-table membership lookups in the dynamic structures
    std::uint64_t catchup_steps = 0;      ///< pairwise table computations done incrementally
    std::uint64_t dump_probes = 0;        ///< membership probes spent while dumping stashes

    OpCounters &operator+=(const OpCounters &o) noexcept {
        word_ops += o.word_ops;
        fingerprint_hits += o.fingerprint_hits;
        false_positives += o.false_positives;
        verify_probes += o.verify_probes;
        membership_probes += o.membership_probes;
        catchup_steps += o.catchup_steps;
        dump_probes += o.dump_probes;
        return *this;
    }

    friend OpCounters operator-(OpCounters a, const OpCounters &b) noexcept {
        a.word_ops -= b.word_ops;
        a.fingerprint_hits -= b.fingerprint_hits;
        a.false_positives -= b.false_positives;
        a.verify_probes -= b.verify_probes;
        a.membership_probes -= b.membership_probes;
        a.catchup_steps -= b.catchup_steps;
        a.dump_probes -= b.dump_probes;
        return a;
    }
};

inline OpCounters &counters() noexcept {
    thread_local OpCounters c;
    return c;
}

inline void reset_counters() noexcept { counters() = OpCounters{}; }

/// Records the counter delta accumulated on this thread during its lifetime.
class CounterScope {
  public:
    CounterScope() noexcept : start_(counters()) {}

    OpCounters delta() const noexcept { return counters() - start_; }

  private:
    OpCounters start_;
};

}  // namespace setix
