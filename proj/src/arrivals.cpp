#include "edcast/arrivals.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

namespace edcast::arrivals {

namespace {

constexpr double kHoursPerYear = 365.25 * 24.0;

template <std::size_t N>
void check_multipliers(const std::array<double, N>& m, const char* name) {
    for (double v : m) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument(fmt::format("{} multipliers must be positive", name));
        }
    }
    const double mean = std::accumulate(m.begin(), m.end(), 0.0) / static_cast<double>(N);
    if (std::abs(mean - 1.0) > 1e-9) {
        throw std::invalid_argument(fmt::format("{} multipliers must average 1 (got {})", name, mean));
    }
}

template <std::size_t N>
std::array<double, N> parse_list(const std::string& text, const char* name) {
    std::array<double, N> out{};
    std::stringstream ss(text);
    std::string item;
    std::size_t count = 0;
    while (std::getline(ss, item, ',')) {
        if (count == N) break;
        try {
            std::size_t used = 0;
            out[count] = std::stod(item, &used);
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw std::invalid_argument(fmt::format("{}: cannot parse '{}'", name, item));
        }
        ++count;
    }
    if (count != N || std::getline(ss, item, ',')) {
        throw std::invalid_argument(fmt::format("{} needs exactly {} values", name, N));
    }
    return out;
}

}  // namespace

void ArrivalGenConfig::validate() const {
    if (n_hours < 1) throw std::invalid_argument("n_hours must be at least 1");
    if (!(base_rate > 0.0) || !std::isfinite(base_rate)) {
        throw std::invalid_argument("base_rate must be positive");
    }
    if (!std::isfinite(trend_pct_per_year) || trend_pct_per_year <= -100.0) {
        throw std::invalid_argument("trend_pct_per_year must exceed -100");
    }
    if (!(annual_amplitude >= 0.0 && annual_amplitude < 1.0)) {
        throw std::invalid_argument("annual_amplitude must lie in [0, 1)");
    }
    check_multipliers(diurnal, "diurnal");
    check_multipliers(day_of_week, "day_of_week");
}

ArrivalGenConfig flat_config(Timestamp start, std::size_t n_hours, double base_rate,
                             std::uint64_t seed) {
    ArrivalGenConfig c;
    c.start = start;
    c.n_hours = n_hours;
    c.base_rate = base_rate;
    c.diurnal.fill(1.0);
    c.day_of_week.fill(1.0);
    c.seed = seed;
    return c;
}

ArrivalGenConfig default_config() {
    ArrivalGenConfig c;
    c.start = parse_timestamp("2017-04-01T00:00:00");
    c.n_hours = 3672;
    c.base_rate = 6.0;
    c.trend_pct_per_year = 3.0;
    c.annual_amplitude = 0.05;
    c.seed = 42;
    c.diurnal = {0.75, 0.62, 0.52, 0.45, 0.42, 0.45, 0.55, 0.75, 1.00, 1.23, 1.38, 1.43,
                 1.40, 1.36, 1.33, 1.30, 1.28, 1.26, 1.25, 1.23, 1.16, 1.08, 0.96, 0.84};
    c.day_of_week = {1.10, 1.03, 1.00, 0.99, 0.98, 0.94, 0.96};
    return c;
}

namespace {

// Strict conversion: the whole value must parse, unlike ptree's lenient get_optional<T>.
template <class T>
void read_number(const boost::property_tree::ptree& tree, const char* key, T& out) {
    const auto text = tree.get_optional<std::string>(key);
    if (!text) return;
    const char* first = text->data();
    const char* last = first + text->size();
    while (first != last && *first == ' ') ++first;
    while (last != first && last[-1] == ' ') --last;
    T value{};
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || first == last) {
        throw std::invalid_argument(fmt::format("config: bad value '{}' for {}", *text, key));
    }
    out = value;
}

}  // namespace

ArrivalGenConfig read_config(std::istream& in) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw std::invalid_argument(fmt::format("config: {}", e.message()));
    }
    ArrivalGenConfig c = default_config();
    if (auto v = tree.get_optional<std::string>("generator.start")) c.start = parse_timestamp(*v);
    read_number(tree, "generator.n_hours", c.n_hours);
    read_number(tree, "generator.base_rate", c.base_rate);
    read_number(tree, "generator.trend_pct_per_year", c.trend_pct_per_year);
    read_number(tree, "generator.annual_amplitude", c.annual_amplitude);
    read_number(tree, "generator.seed", c.seed);
    if (auto v = tree.get_optional<std::string>("generator.noise"); v && *v != "poisson") {
        throw std::invalid_argument(fmt::format("config: unsupported noise '{}'", *v));
    }
    if (auto v = tree.get_optional<std::string>("profile.diurnal")) c.diurnal = parse_list<24>(*v, "diurnal");
    if (auto v = tree.get_optional<std::string>("profile.day_of_week")) {
        c.day_of_week = parse_list<7>(*v, "day_of_week");
    }
    c.validate();
    return c;
}

ArrivalGenConfig read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure(fmt::format("cannot open config file {}", path.string()));
    return read_config(in);
}

double arrival_rate(const ArrivalGenConfig& c, std::size_t i) {
    using namespace std::chrono;
    const Timestamp t = c.start + kHour * static_cast<long long>(i);
    const auto day = floor<days>(t);
    const auto hour = static_cast<std::size_t>(duration_cast<hours>(t - day).count());
    const year_month_day ymd{day};
    const auto doy = (day - sys_days{ymd.year() / January / 1}).count() + 1;
    const weekday wd{day};
    const double years = static_cast<double>(i) / kHoursPerYear;
    return c.base_rate * std::pow(1.0 + c.trend_pct_per_year / 100.0, years) * c.diurnal[hour] *
           c.day_of_week[wd.iso_encoding() - 1] *
           (1.0 + c.annual_amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(doy) / 365.25));
}

Series generate_arrivals(const ArrivalGenConfig& config) {
    config.validate();
    std::mt19937_64 rng(config.seed);
    std::vector<double> values(config.n_hours);
    for (std::size_t i = 0; i < config.n_hours; ++i) {
        std::poisson_distribution<long> draw(arrival_rate(config, i));
        values[i] = static_cast<double>(draw(rng));
    }
    return Series(config.start, std::move(values), kHour, "arrivals");
}

}  // namespace edcast::arrivals
