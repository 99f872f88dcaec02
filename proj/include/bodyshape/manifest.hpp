#pragma once

#include <bodyshape/body_shape.hpp>
#include <bodyshape/error.hpp>
#include <bodyshape/image.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace bodyshape {

enum class Sex { Male, Female };

constexpr std::string_view to_string(Sex s) { return s == Sex::Male ? "male" : "female"; }

/// Tape-measured ground truth, always complete when present.
struct MeasurementTruth {
    double bust = 0.0;
    double waist = 0.0;
    double hip = 0.0;
    friend bool operator==(const MeasurementTruth&, const MeasurementTruth&) = default;
};

struct SubjectRecord {
    std::filesystem::path image_path;
    HeightCm height;
    std::optional<BodyShape> true_shape;
    std::optional<MeasurementTruth> truth;
    std::optional<Sex> sex;
    friend bool operator==(const SubjectRecord&, const SubjectRecord&) = default;
};

inline constexpr std::string_view kManifestHeader = "image,height_cm,shape,bust_cm,waist_cm,hip_cm,sex";

namespace detail {

inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto comma = line.find(',', start);
        out.emplace_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline std::optional<double> parse_number(std::string_view text) {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    if (text.empty()) return std::nullopt;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
    return value;
}

inline std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

} // namespace detail

/// Reads the evaluation manifest. Image paths are resolved against the
/// manifest's directory; empty optional cells become std::nullopt.
inline std::vector<SubjectRecord> read_dataset_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::UnreadableFile, "cannot open manifest " + path.string());

    const auto base = path.parent_path();
    auto malformed = [&](int line_no, const std::string& what) {
        return Error(ErrorKind::MalformedManifest,
                     path.string() + ":" + std::to_string(line_no) + ": " + what);
    };

    std::string line;
    int line_no = 0;
    std::map<std::string, std::size_t> column;
    std::size_t n_columns = 0;
    std::vector<SubjectRecord> records;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);

        if (line_no == 1) {
            auto names = detail::split_csv_line(line);
            for (std::size_t i = 0; i < names.size(); ++i) column[names[i]] = i;
            n_columns = names.size();
            for (auto required : {"image", "height_cm"}) {
                if (!column.contains(required)) throw malformed(line_no, std::string("missing column ") + required);
            }
            continue;
        }
        if (line.find_first_not_of(" \t") == std::string::npos) continue;

        auto cells = detail::split_csv_line(line);
        if (cells.size() != n_columns) {
            throw malformed(line_no, "expected " + std::to_string(n_columns) + " fields, got " +
                                         std::to_string(cells.size()));
        }
        auto cell = [&](const char* name) -> std::string_view {
            auto it = column.find(name);
            return it == column.end() ? std::string_view{} : std::string_view{cells[it->second]};
        };

        if (cell("image").empty()) throw malformed(line_no, "empty image path");
        auto height = detail::parse_number(cell("height_cm"));
        if (!height) throw malformed(line_no, "unparsable height '" + std::string(cell("height_cm")) + "'");

        std::optional<HeightCm> h;
        try {
            h = validate_height(*height);
        } catch (const Error& e) {
            throw malformed(line_no, e.what());
        }

        SubjectRecord rec{(base / std::filesystem::path(std::string(cell("image")))).lexically_normal(), *h,
                          std::nullopt, std::nullopt, std::nullopt};

        if (auto label = cell("shape"); !label.empty()) {
            rec.true_shape = parse_shape(label);
            if (!rec.true_shape) throw malformed(line_no, "unknown shape label '" + std::string(label) + "'");
        }

        std::optional<double> values[3];
        const char* names[3] = {"bust_cm", "waist_cm", "hip_cm"};
        int present = 0;
        for (int i = 0; i < 3; ++i) {
            auto text = cell(names[i]);
            if (text.empty()) continue;
            values[i] = detail::parse_number(text);
            if (!values[i]) throw malformed(line_no, std::string("unparsable ") + names[i]);
            ++present;
        }
        if (present != 0 && present != 3) throw malformed(line_no, "bust, waist and hip must be given together");
        if (present == 3) rec.truth = MeasurementTruth{*values[0], *values[1], *values[2]};

        if (auto sex = cell("sex"); !sex.empty()) {
            if (sex == "male") rec.sex = Sex::Male;
            else if (sex == "female") rec.sex = Sex::Female;
            else throw malformed(line_no, "unknown sex '" + std::string(sex) + "'");
        }
        records.push_back(std::move(rec));
    }
    if (line_no == 0) throw Error(ErrorKind::MalformedManifest, path.string() + ": missing header");
    return records;
}

/// Writes records in the manifest layout; image paths are stored relative to
/// the manifest directory when possible.
inline void write_manifest(const std::filesystem::path& path, const std::vector<SubjectRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::UnreadableFile, "cannot write manifest " + path.string());
    const auto base = path.parent_path();
    out << kManifestHeader << '\n';
    for (const auto& r : records) {
        auto image = r.image_path.lexically_relative(base.empty() ? "." : base);
        if (image.empty() || image.string().starts_with("..")) image = r.image_path;
        out << image.generic_string() << ',' << detail::format_number(r.height.value()) << ',';
        if (r.true_shape) out << to_string(*r.true_shape);
        out << ',';
        if (r.truth) {
            out << detail::format_number(r.truth->bust) << ',' << detail::format_number(r.truth->waist) << ','
                << detail::format_number(r.truth->hip);
        } else {
            out << ",,";
        }
        out << ',';
        if (r.sex) out << to_string(*r.sex);
        out << '\n';
    }
}

} // namespace bodyshape
