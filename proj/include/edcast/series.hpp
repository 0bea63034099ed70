#pragma once

#include <chrono>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace edcast {

using Timestamp = std::chrono::sys_seconds;
using Duration = std::chrono::seconds;

inline constexpr Duration kHour{3600};

/// Parses `YYYY-MM-DDTHH:MM:SS` (UTC). Throws std::invalid_argument on malformed text.
[[nodiscard]] Timestamp parse_timestamp(std::string_view text);

/// Formats as `YYYY-MM-DDTHH:MM:SS`.
[[nodiscard]] std::string format_timestamp(Timestamp t);

/**
 * @brief Regular, gap-free time series.
 *
 * Timestamps are implicit: index i lives at start + i * step. Values are
 * finite reals (counts are stored as doubles so residuals and differenced
 * series share the type). Immutable after construction.
 */
class Series {
public:
    Series(Timestamp start, std::vector<double> values, Duration step = kHour,
           std::string label = {});

    [[nodiscard]] Timestamp start() const noexcept { return start_; }
    [[nodiscard]] Duration step() const noexcept { return step_; }
    [[nodiscard]] const std::string& label() const noexcept { return label_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }

    [[nodiscard]] Timestamp time_at(std::size_t i) const noexcept {
        return start_ + step_ * static_cast<long long>(i);
    }
    /// Index of timestamp `t`; throws if `t` is off-grid or before start.
    [[nodiscard]] std::size_t index_of(Timestamp t) const;

    /// Contiguous sub-series [first, first + count).
    [[nodiscard]] Series slice(std::size_t first, std::size_t count) const;

    /// Same grid, new values (length may differ).
    [[nodiscard]] Series with_values(std::vector<double> values) const;

private:
    Timestamp start_;
    Duration step_;
    std::vector<double> values_;
    std::string label_;
};

struct Record {
    Timestamp time;
    double value;
};

enum class GapPolicy { error, zero_fill, linear_interpolate };

/**
 * Builds a gap-free series from (timestamp, value) records.
 *
 * Records are sorted by time first. Every timestamp must sit on the grid
 * first + k * step. Missing grid points are resolved by `policy`; duplicate
 * timestamps are always an error.
 */
[[nodiscard]] Series from_records(std::vector<Record> records, Duration step = kHour,
                                  GapPolicy policy = GapPolicy::error, std::string label = {});

/// Applies (1 - B^lag)^times. The result starts lag*times steps later.
[[nodiscard]] Series difference(const Series& series, std::size_t lag, std::size_t times = 1);

/// Raw-vector form of difference().
[[nodiscard]] std::vector<double> difference(std::span<const double> values, std::size_t lag,
                                             std::size_t times = 1);

/// Train/test boundary given either as an index or as a timestamp.
struct SplitSpec {
    static SplitSpec at_index(std::size_t index) { return SplitSpec{index, {}, false}; }
    static SplitSpec at_time(Timestamp t) { return SplitSpec{0, t, true}; }

    std::size_t index = 0;
    Timestamp time{};
    bool by_time = false;
};

/// Splits so that the second part starts at the boundary. Both parts are non-empty.
[[nodiscard]] std::pair<Series, Series> split(const Series& series, const SplitSpec& spec);

/// Concatenates two series where `b` continues `a` on the same grid.
[[nodiscard]] Series concatenate(const Series& a, const Series& b);

// CSV format: header `timestamp,value`, ISO-8601 timestamps, `.` decimal point.
[[nodiscard]] Series read_series_csv(std::istream& in, Duration step = kHour,
                                     GapPolicy policy = GapPolicy::error);
void write_series_csv(std::ostream& out, const Series& series);

}  // namespace edcast
