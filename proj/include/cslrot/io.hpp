#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace cslrot {

inline constexpr const char* kToolName = "cslrot";
inline constexpr const char* kToolVersion = "1.0.0";

struct BoundCurve;
struct ScanResult;
struct OptimizationResult;
struct PsdEstimate;
struct Trajectory;
struct ValidationReport;
struct OverlayCurve;

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
// Whole-string decimal or scientific number; rejects suffixes and non-finite values.
std::optional<double> parse_double(std::string_view s);
std::string format_double(double v);  // %.16e

// Ordered key/value block written at the top of every output file.
class Metadata {
public:
    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value) { set(key, format_double(value)); }
    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
    std::string csv_comment() const;
    nlohmann::json to_json() const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

Metadata base_metadata(const std::string& command);

void write_text_file(const std::filesystem::path& path, const std::string& content);
void ensure_directory(const std::filesystem::path& dir);

std::string bound_curve_csv(const BoundCurve& curve, const Metadata& meta);
nlohmann::json bound_curve_json(const BoundCurve& curve, const Metadata& meta);

std::string scan_csv(const ScanResult& scan, const Metadata& meta);
nlohmann::json scan_json(const ScanResult& scan, const Metadata& meta);

nlohmann::json optimization_json(const OptimizationResult& res, const Metadata& meta);

std::string trajectory_csv(const Trajectory& t, const Metadata& meta);
std::string psd_csv(const std::vector<double>& omega, const std::vector<double>& psd,
                    const std::vector<double>& stderr_abs, const Metadata& meta);
nlohmann::json validation_json(const ValidationReport& rep, const Metadata& meta);

std::string overlay_csv(const std::vector<OverlayCurve>& curves, const Metadata& meta);

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotAxes {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = true;
    bool log_y = true;
};

std::string svg_line_plot(const std::vector<PlotSeries>& series, const PlotAxes& axes);

}  // namespace cslrot
