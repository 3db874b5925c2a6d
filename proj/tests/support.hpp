#pragma once

#include "foilforge/binio.hpp"
#include "foilforge/geometry.hpp"
#include "foilforge/log.hpp"

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

namespace support {

inline std::string corpus_dir() {
    return FOILFORGE_CORPUS;
}

inline std::vector<std::filesystem::path> corpus_files() {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(corpus_dir())) {
        if (e.path().extension() == ".dat") {
            files.push_back(e.path());
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

inline foilforge::geometry::RawContour read_contour(const std::filesystem::path& path) {
    const auto bytes = foilforge::binio::read_file(path.string());
    return foilforge::geometry::parse_dat(std::string(bytes.begin(), bytes.end()));
}

inline foilforge::geometry::Airfoil naca_airfoil(double m, double p, double t, const std::string& name) {
    using namespace foilforge::geometry;
    return repanel(normalize(naca4(m, p, t, 201, name)));
}

// Silences library notes for the lifetime of the object.
struct QuietLog {
    foilforge::LogSink previous;
    QuietLog() : previous(foilforge::set_log_sink([](std::string_view) {})) {}
    ~QuietLog() { foilforge::set_log_sink(previous); }
};

} // namespace support
