#include "epictrl/data/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "epictrl/common/errors.hpp"

namespace epictrl::data {

namespace {

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name, const std::string& file) const
    {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw ParseError(file + ": missing required column '" + name + "'");
        }
        return static_cast<std::size_t>(it - header.begin());
    }

    std::optional<std::size_t> column_if_present(const std::string& name) const
    {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            return std::nullopt;
        }
        return static_cast<std::size_t>(it - header.begin());
    }
};

CsvTable read_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path);
    }
    CsvTable table;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (table.header.empty()) {
            table.header = split_csv_line(line);
        } else {
            table.rows.push_back(split_csv_line(line));
        }
    }
    if (table.header.empty()) {
        throw ParseError(path + ": empty file, expected a header row");
    }
    return table;
}

double parse_number(const std::string& text, const std::string& context)
{
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw ParseError("bad numeric value '" + text + "' in " + context);
    }
}

} // namespace

sir::StringencySeries load_stringency_csv(const std::string& path,
                                          const std::string& country_code,
                                          Date range_start, Date range_end,
                                          IngestWarnings* warnings)
{
    const CsvTable table = read_csv(path);
    const std::size_t c_iso = table.column("iso_code", path);
    const std::size_t c_date = table.column("date", path);
    const std::size_t c_str = table.column("stringency_index", path);

    const int days = range_end - range_start;
    if (days < 0) {
        throw DomainError("empty date range");
    }
    std::vector<std::optional<double>> values(static_cast<std::size_t>(days) + 1);
    bool country_seen = false;
    for (const auto& row : table.rows) {
        if (row.size() <= std::max({c_iso, c_date, c_str})) {
            continue;
        }
        if (row[c_iso] != country_code) {
            continue;
        }
        country_seen = true;
        if (row[c_str].empty()) {
            continue;
        }
        const Date d = Date::parse(row[c_date]);
        const int offset = d - range_start;
        if (offset < 0 || offset > days) {
            continue;
        }
        values[static_cast<std::size_t>(offset)] =
            parse_number(row[c_str], path + " stringency_index");
    }
    if (!country_seen) {
        throw LookupError(path + ": no rows for country '" + country_code + "'");
    }

    const auto first = std::find_if(values.begin(), values.end(),
                                    [](const auto& v) { return v.has_value(); });
    if (first == values.end()) {
        throw CoverageError(path + ": no stringency data for '" + country_code +
                            "' in the requested range");
    }

    std::vector<double> out(values.size());
    double last = **first; // leading gaps back-fill from the first observation
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (values[k]) {
            last = *values[k];
        } else if (warnings) {
            ++warnings->filled_stringency_days;
        }
        out[k] = last;
    }
    return sir::StringencySeries(range_start, std::move(out));
}

calib::ObservedSeries load_compartments_csv(const std::string& path, double population,
                                            Date range_start, Date range_end,
                                            const IngestOptions& opts,
                                            IngestWarnings* warnings)
{
    const CsvTable table = read_csv(path);
    const std::size_t c_date = table.column("date", path);
    const std::size_t c_total = table.column("total_cases", path);
    const std::size_t c_rec = table.column("recovered", path);
    const auto c_deaths = table.column_if_present("deaths");

    const int days = range_end - range_start;
    if (days < 0) {
        throw DomainError("empty date range");
    }
    struct Row {
        double total, recovered, deaths;
    };
    std::vector<std::optional<Row>> rows(static_cast<std::size_t>(days) + 1);
    for (const auto& row : table.rows) {
        if (row.size() <= std::max(c_date, std::max(c_total, c_rec))) {
            continue;
        }
        const Date d = Date::parse(row[c_date]);
        const int offset = d - range_start;
        if (offset < 0 || offset > days) {
            continue;
        }
        Row r{parse_number(row[c_total], path + " total_cases"),
              parse_number(row[c_rec], path + " recovered"), 0.0};
        if (c_deaths && opts.subtract_deaths && row.size() > *c_deaths &&
            !row[*c_deaths].empty()) {
            r.deaths = parse_number(row[*c_deaths], path + " deaths");
        }
        rows[static_cast<std::size_t>(offset)] = r;
    }

    // Interior gaps up to max_gap_days are linearly interpolated.
    std::optional<std::size_t> prev;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (!rows[k]) {
            continue;
        }
        if (prev && k - *prev > 1) {
            const std::size_t gap = k - *prev - 1;
            if (static_cast<int>(gap) > opts.max_gap_days) {
                throw CoverageError(path + ": gap of " + std::to_string(gap) +
                                    " days around " +
                                    (range_start + static_cast<int>(*prev + 1)).to_string() +
                                    " exceeds the " + std::to_string(opts.max_gap_days) +
                                    "-day interpolation limit");
            }
            for (std::size_t j = *prev + 1; j < k; ++j) {
                const double w = static_cast<double>(j - *prev) / static_cast<double>(k - *prev);
                rows[j] = Row{(1 - w) * rows[*prev]->total + w * rows[k]->total,
                              (1 - w) * rows[*prev]->recovered + w * rows[k]->recovered,
                              (1 - w) * rows[*prev]->deaths + w * rows[k]->deaths};
                if (warnings) {
                    ++warnings->interpolated_compartment_days;
                }
            }
        }
        prev = k;
    }
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (!rows[k]) {
            throw CoverageError(path + ": no compartment data for " +
                                (range_start + static_cast<int>(k)).to_string());
        }
    }

    std::vector<double> s, i, r;
    double prev_total = -1.0;
    for (const auto& row : rows) {
        if (row->total < prev_total && warnings) {
            ++warnings->monotonicity_violations; // retained, source noise
        }
        prev_total = row->total;
        double infected = row->total - row->recovered - row->deaths;
        double recovered = row->recovered + row->deaths;
        if (infected < 0) {
            infected = 0;
            if (warnings) {
                ++warnings->clipped_negative_values;
            }
        }
        i.push_back(infected);
        r.push_back(recovered);
        s.push_back(population - infected - recovered);
    }
    return calib::ObservedSeries(range_start, std::move(s), std::move(i), std::move(r),
                                 population);
}

std::vector<std::pair<Quarter, double>> load_gdp_csv(const std::string& path,
                                                     const std::string& country_code)
{
    const CsvTable table = read_csv(path);
    const std::size_t c_loc = table.column("LOCATION", path);
    const std::size_t c_time = table.column("TIME", path);
    const std::size_t c_val = table.column("Value", path);

    std::map<Quarter, double> byq;
    bool seen = false;
    for (const auto& row : table.rows) {
        if (row.size() <= std::max({c_loc, c_time, c_val})) {
            continue;
        }
        if (row[c_loc] != country_code) {
            continue;
        }
        seen = true;
        const Quarter q = Quarter::parse(row[c_time]);
        const double v = parse_number(row[c_val], path + " Value");
        if (byq.count(q)) {
            throw ParseError(path + ": duplicate rows for quarter " + q.to_string());
        }
        byq[q] = v;
    }
    if (!seen) {
        throw LookupError(path + ": no rows for country '" + country_code + "'");
    }
    return {byq.begin(), byq.end()};
}

DatasetBundle make_bundle(const std::string& country, calib::ObservedSeries observed,
                          sir::StringencySeries stringency, econ::DailyGdpSeries gdp_daily,
                          double population)
{
    if (observed.size() != stringency.size() ||
        observed.size() != gdp_daily.values.size() ||
        observed.start_date() != stringency.start_date() ||
        observed.start_date() != gdp_daily.start_date) {
        throw AlignmentError("bundle series must share one daily grid");
    }
    DatasetBundle b{country,
                    std::move(observed),
                    std::move(stringency),
                    std::move(gdp_daily),
                    population,
                    Date{},
                    Date{}};
    b.start_date = b.observed.start_date();
    b.end_date = b.start_date + (static_cast<int>(b.observed.size()) - 1);
    return b;
}

using nlohmann::json;

std::string DatasetBundle::to_json_text() const
{
    json j;
    j["version"] = 1;
    j["country"] = country;
    j["population"] = population;
    j["start_date"] = start_date.to_string();
    j["end_date"] = end_date.to_string();
    j["stringency"] = stringency.values();
    j["s"] = observed.s();
    j["i"] = observed.i();
    j["r"] = observed.r();
    j["gdp_daily"] = gdp_daily.values;
    return j.dump();
}

DatasetBundle DatasetBundle::from_json_text(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid bundle: ") + e.what());
    }
    if (j.value("version", 0) != 1) {
        throw ParseError("unsupported bundle version");
    }
    const Date start = Date::parse(j.at("start_date").get<std::string>());
    const double population = j.at("population").get<double>();
    calib::ObservedSeries obs(start, j.at("s").get<std::vector<double>>(),
                              j.at("i").get<std::vector<double>>(),
                              j.at("r").get<std::vector<double>>(), population);
    sir::StringencySeries str(start, j.at("stringency").get<std::vector<double>>());
    econ::DailyGdpSeries gdp{start, j.at("gdp_daily").get<std::vector<double>>()};
    return make_bundle(j.value("country", std::string{}), std::move(obs), std::move(str),
                       std::move(gdp), population);
}

void DatasetBundle::save(const std::string& path) const
{
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write bundle " + path);
    }
    out << to_json_text() << "\n";
}

DatasetBundle DatasetBundle::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open bundle " + path);
    }
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return from_json_text(text);
}

} // namespace epictrl::data
