#ifndef EPICTRL_DATA_INGEST_HPP
#define EPICTRL_DATA_INGEST_HPP

#include <string>
#include <utility>
#include <vector>

#include "epictrl/calib/loss.hpp"
#include "epictrl/econ/gdp.hpp"
#include "epictrl/sir/types.hpp"

namespace epictrl::data {

struct IngestOptions {
    /// Fold a deaths column (when present) out of the active-infection proxy.
    bool subtract_deaths = false;
    /// Compartment gaps up to this many days are linearly interpolated;
    /// longer gaps are an error.
    int max_gap_days = 3;
};

struct IngestWarnings {
    std::size_t clipped_negative_values = 0;
    std::size_t monotonicity_violations = 0;
    std::size_t filled_stringency_days = 0;
    std::size_t interpolated_compartment_days = 0;
};

/// Daily stringency for one country from an OWID-schema CSV
/// (iso_code, location, date, stringency_index columns). Interior gaps are
/// forward-filled; leading gaps are back-filled from the first observation.
sir::StringencySeries load_stringency_csv(const std::string& path,
                                          const std::string& country_code,
                                          Date range_start, Date range_end,
                                          IngestWarnings* warnings = nullptr);

/// Observed compartments from a worldometer-style snapshot CSV
/// (date, total_cases, recovered[, deaths] columns):
/// I = total - recovered (active proxy), R = recovered, S = N - I - R.
calib::ObservedSeries load_compartments_csv(const std::string& path, double population,
                                            Date range_start, Date range_end,
                                            const IngestOptions& opts = {},
                                            IngestWarnings* warnings = nullptr);

/// Chronological quarterly normalized-GDP values for one country from an
/// OECD-schema CSV (LOCATION, TIME, Value columns).
std::vector<std::pair<Quarter, double>> load_gdp_csv(const std::string& path,
                                                     const std::string& country_code);

/// All three sources aligned on one daily grid.
struct DatasetBundle {
    std::string country;
    calib::ObservedSeries observed;
    sir::StringencySeries stringency;
    econ::DailyGdpSeries gdp_daily;
    double population = 0.0;
    Date start_date;
    Date end_date;

    std::string to_json_text() const;
    static DatasetBundle from_json_text(const std::string& text);
    void save(const std::string& path) const;
    static DatasetBundle load(const std::string& path);
};

DatasetBundle make_bundle(const std::string& country, calib::ObservedSeries observed,
                          sir::StringencySeries stringency, econ::DailyGdpSeries gdp_daily,
                          double population);

} // namespace epictrl::data

#endif
