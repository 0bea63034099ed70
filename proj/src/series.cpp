#include "edcast/series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace edcast {

namespace {

int parse_int(std::string_view text, std::string_view whole) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw std::invalid_argument(fmt::format("malformed timestamp '{}'", whole));
    }
    return value;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
    text = trim(text);
    // YYYY-MM-DDTHH:MM:SS
    if (text.size() != 19 || text[4] != '-' || text[7] != '-' ||
        (text[10] != 'T' && text[10] != ' ') || text[13] != ':' || text[16] != ':') {
        throw std::invalid_argument(fmt::format("malformed timestamp '{}'", text));
    }
    using namespace std::chrono;
    const int y = parse_int(text.substr(0, 4), text);
    const int mo = parse_int(text.substr(5, 2), text);
    const int d = parse_int(text.substr(8, 2), text);
    const int hh = parse_int(text.substr(11, 2), text);
    const int mm = parse_int(text.substr(14, 2), text);
    const int ss = parse_int(text.substr(17, 2), text);
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                             day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || hh > 23 || mm > 59 || ss > 59) {
        throw std::invalid_argument(fmt::format("invalid timestamp '{}'", text));
    }
    return sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss};
}

std::string format_timestamp(Timestamp t) {
    using namespace std::chrono;
    const auto day_start = floor<days>(t);
    const year_month_day ymd{day_start};
    const hh_mm_ss tod{t - day_start};
    return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}", static_cast<int>(ymd.year()),
                       static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                       tod.hours().count(), tod.minutes().count(), tod.seconds().count());
}

Series::Series(Timestamp start, std::vector<double> values, Duration step, std::string label)
    : start_(start), step_(step), values_(std::move(values)), label_(std::move(label)) {
    if (values_.empty()) {
        throw std::invalid_argument("series must contain at least one value");
    }
    if (step_.count() <= 0) {
        throw std::invalid_argument("series step must be positive");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw std::invalid_argument(fmt::format("series value at index {} is not finite", i));
        }
    }
}

std::size_t Series::index_of(Timestamp t) const {
    const auto offset = t - start_;
    if (offset.count() < 0 || offset.count() % step_.count() != 0) {
        throw std::invalid_argument(
            fmt::format("timestamp {} is not on the series grid", format_timestamp(t)));
    }
    return static_cast<std::size_t>(offset.count() / step_.count());
}

Series Series::slice(std::size_t first, std::size_t count) const {
    if (count == 0 || first + count > values_.size()) {
        throw std::invalid_argument("slice out of range");
    }
    std::vector<double> part(values_.begin() + static_cast<std::ptrdiff_t>(first),
                             values_.begin() + static_cast<std::ptrdiff_t>(first + count));
    return Series(time_at(first), std::move(part), step_, label_);
}

Series Series::with_values(std::vector<double> values) const {
    return Series(start_, std::move(values), step_, label_);
}

Series from_records(std::vector<Record> records, Duration step, GapPolicy policy,
                    std::string label) {
    if (records.empty()) {
        throw std::invalid_argument("no records");
    }
    if (step.count() <= 0) {
        throw std::invalid_argument("step must be positive");
    }
    std::stable_sort(records.begin(), records.end(),
                     [](const Record& a, const Record& b) { return a.time < b.time; });

    const Timestamp first = records.front().time;
    const auto span = records.back().time - first;
    if (span.count() % step.count() != 0) {
        throw std::invalid_argument(fmt::format("timestamp {} is not on the {}s grid",
                                                format_timestamp(records.back().time),
                                                step.count()));
    }
    const std::size_t n = static_cast<std::size_t>(span.count() / step.count()) + 1;
    std::vector<double> values(n, 0.0);
    std::vector<bool> present(n, false);
    for (const auto& r : records) {
        const auto offset = (r.time - first).count();
        if (offset % step.count() != 0) {
            throw std::invalid_argument(fmt::format("timestamp {} is not on the {}s grid",
                                                    format_timestamp(r.time), step.count()));
        }
        const auto i = static_cast<std::size_t>(offset / step.count());
        if (present[i]) {
            throw std::invalid_argument(
                fmt::format("duplicate timestamp {}", format_timestamp(r.time)));
        }
        present[i] = true;
        values[i] = r.value;
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (present[i]) continue;
        switch (policy) {
            case GapPolicy::error:
                throw std::invalid_argument(
                    fmt::format("missing observation at {}",
                                format_timestamp(first + step * static_cast<long long>(i))));
            case GapPolicy::zero_fill:
                values[i] = 0.0;
                break;
            case GapPolicy::linear_interpolate: {
                // first and last are always present, so both neighbours exist
                std::size_t lo = i - 1;
                std::size_t hi = i + 1;
                while (!present[hi]) ++hi;
                const double w = static_cast<double>(i - lo) / static_cast<double>(hi - lo);
                values[i] = values[lo] + w * (values[hi] - values[lo]);
                break;
            }
        }
    }
    return Series(first, std::move(values), step, std::move(label));
}

std::vector<double> difference(std::span<const double> values, std::size_t lag,
                               std::size_t times) {
    if (lag == 0) {
        throw std::invalid_argument("difference lag must be positive");
    }
    if (values.size() <= lag * times) {
        throw std::invalid_argument(
            fmt::format("series of length {} too short for {} difference(s) at lag {}",
                        values.size(), times, lag));
    }
    std::vector<double> out(values.begin(), values.end());
    for (std::size_t k = 0; k < times; ++k) {
        for (std::size_t i = out.size() - 1; i >= lag; --i) {
            out[i] -= out[i - lag];
        }
        out.erase(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(lag));
    }
    return out;
}

Series difference(const Series& series, std::size_t lag, std::size_t times) {
    auto values = difference(series.values(), lag, times);
    return Series(series.time_at(lag * times), std::move(values), series.step(), series.label());
}

std::pair<Series, Series> split(const Series& series, const SplitSpec& spec) {
    std::size_t boundary = spec.index;
    if (spec.by_time) {
        if (spec.time <= series.start()) {
            throw std::invalid_argument("split boundary at or before series start");
        }
        boundary = series.index_of(spec.time);
    }
    if (boundary == 0 || boundary >= series.size()) {
        throw std::invalid_argument(fmt::format(
            "split boundary {} outside the interior of a series of length {}", boundary,
            series.size()));
    }
    return {series.slice(0, boundary), series.slice(boundary, series.size() - boundary)};
}

Series concatenate(const Series& a, const Series& b) {
    if (a.step() != b.step() || a.time_at(a.size()) != b.start()) {
        throw std::invalid_argument("series are not contiguous on the same grid");
    }
    std::vector<double> values(a.values().begin(), a.values().end());
    values.insert(values.end(), b.values().begin(), b.values().end());
    return Series(a.start(), std::move(values), a.step(), a.label());
}

Series read_series_csv(std::istream& in, Duration step, GapPolicy policy) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("empty CSV input");
    }
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);
    const auto header = trim(line);
    if (header.substr(0, header.find(',')) != "timestamp") {
        throw std::invalid_argument("CSV header must start with 'timestamp,value'");
    }

    std::vector<Record> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto row = trim(line);
        if (row.empty()) continue;
        const auto comma = row.find(',');
        if (comma == std::string_view::npos) {
            throw std::invalid_argument(fmt::format("line {}: expected two fields", line_no));
        }
        const Timestamp t = parse_timestamp(row.substr(0, comma));
        if (step.count() % 3600 == 0 && (t.time_since_epoch().count() % 3600) != 0) {
            throw std::invalid_argument(
                fmt::format("line {}: minutes and seconds must be zero for hourly data", line_no));
        }
        auto field = trim(row.substr(comma + 1));
        field = field.substr(0, field.find(','));
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
        if (ec != std::errc{} || ptr != field.data() + field.size()) {
            throw std::invalid_argument(
                fmt::format("line {}: cannot parse value '{}'", line_no, field));
        }
        records.push_back({t, value});
    }
    return from_records(std::move(records), step, policy);
}

void write_series_csv(std::ostream& out, const Series& series) {
    out << "timestamp,value\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << format_timestamp(series.time_at(i)) << ',' << fmt::format("{}", series[i]) << '\n';
    }
}

}  // namespace edcast
