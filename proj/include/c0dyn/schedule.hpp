#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "c0dyn/rational.hpp"

namespace c0dyn {

// One certified cell of a witness schedule: for tail index k and witness
// index m, the chosen majority index n, the exact worst symmetric
// difference over shifts |d| <= m, and the enclosure of e^{-1/(m 2^k)}
// whose lower endpoint the slack budget came from.
struct ScheduleEntry {
    std::int64_t n = 0;
    Rational max_symdiff;
    Rational slack;
    Enclosure exp_enclosure{Rational(0), Rational(0)};

    friend bool operator==(const ScheduleEntry&, const ScheduleEntry&) = default;
};

// Rectangular table of schedule entries, 1-based in both k and m.
class WitnessSchedule {
public:
    WitnessSchedule(std::int64_t k_max, std::int64_t m_max, std::vector<ScheduleEntry> entries)
        : k_max_(k_max), m_max_(m_max), entries_(std::move(entries)) {
        if (k_max_ < 1 || m_max_ < 1)
            throw std::invalid_argument("WitnessSchedule: bounds must be >= 1");
        if (entries_.size() != static_cast<std::size_t>(k_max_ * m_max_))
            throw std::invalid_argument("WitnessSchedule: entry count mismatch");
    }

    std::int64_t k_max() const { return k_max_; }
    std::int64_t m_max() const { return m_max_; }

    const ScheduleEntry& at(std::int64_t k, std::int64_t m) const {
        if (k < 1 || k > k_max_ || m < 1 || m > m_max_)
            throw std::out_of_range("WitnessSchedule: index outside the built table");
        return entries_[static_cast<std::size_t>((k - 1) * m_max_ + (m - 1))];
    }

    friend bool operator==(const WitnessSchedule&, const WitnessSchedule&) = default;

private:
    std::int64_t k_max_;
    std::int64_t m_max_;
    std::vector<ScheduleEntry> entries_;
};

}  // namespace c0dyn
