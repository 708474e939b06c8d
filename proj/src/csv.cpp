#include "kinvar/csv.hpp"
#include "kinvar/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

namespace kinvar {

std::string format_double(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, end);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj)
{
    const auto n = static_cast<std::size_t>(traj.concentrations.cols());
    out << "t";
    for (std::size_t i = 0; i < n; ++i)
        out << ',' << (i < traj.species_names.size() ? traj.species_names[i] : "x" + std::to_string(i));
    out << '\n';
    for (std::size_t k = 0; k < traj.points(); ++k) {
        out << format_double(traj.times[k]);
        for (std::size_t i = 0; i < n; ++i)
            out << ',' << format_double(traj.at(k, i));
        out << '\n';
    }
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write '" + path.string() + "'");
    write_trajectory_csv(out, traj);
}

void write_table_csv(std::ostream& out, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& columns)
{
    for (std::size_t c = 0; c < header.size(); ++c)
        out << (c ? "," : "") << header[c];
    out << '\n';
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c)
            out << (c ? "," : "") << format_double(columns[c][r]);
        out << '\n';
    }
}

} // namespace kinvar
