#include "ccrm/bench.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <sstream>

namespace ccrm {

namespace {

std::string short_number(double v) {
    std::ostringstream s;
    s.precision(3);
    s << v;
    return s.str();
}

}  // namespace

Stat median_max(std::vector<double> values) {
    if (values.empty()) throw InvalidArgument("median of an empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t k = values.size();
    const double med = k % 2 ? values[k / 2] : 0.5 * (values[k / 2 - 1] + values[k / 2]);
    return {med, values.back()};
}

std::string median_max_cell(const Stat& stat) {
    return short_number(stat.median) + "(" + short_number(stat.max) + ")";
}

std::vector<CellSummary> summarize(const std::vector<TrialResult>& trials,
                                   const std::vector<std::string>& method_order) {
    std::vector<std::pair<std::size_t, std::size_t>> grid;
    for (const auto& r : trials) {
        const std::pair<std::size_t, std::size_t> nm{r.n, r.m};
        if (std::find(grid.begin(), grid.end(), nm) == grid.end()) grid.push_back(nm);
    }
    std::vector<std::string> methods = method_order;
    for (const auto& r : trials) {
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
    }

    std::vector<CellSummary> cells;
    for (const auto& [n, m] : grid) {
        for (const auto& method : methods) {
            std::vector<double> time, error, iters;
            CellSummary cell;
            cell.n = n;
            cell.m = m;
            cell.method = method;
            for (const auto& r : trials) {
                if (r.n != n || r.m != m || r.method != method) continue;
                time.push_back(r.cpu_time_s);
                error.push_back(r.final_error);
                iters.push_back(static_cast<double>(r.iterations));
                ++(r.solved ? cell.solved : cell.failed);
            }
            if (time.empty()) continue;
            cell.cpu_time_s = median_max(time);
            cell.final_error = median_max(error);
            cell.iterations = median_max(iters);
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

void write_summary_csv(std::ostream& out, const std::vector<CellSummary>& cells) {
    out << "n,m,method,cpu_time_s,final_error,iterations,solved,failed\n";
    for (const auto& c : cells) {
        out << c.n << ',' << c.m << ',' << c.method << ',' << median_max_cell(c.cpu_time_s) << ','
            << median_max_cell(c.final_error) << ',' << median_max_cell(c.iterations) << ','
            << c.solved << ',' << c.failed << '\n';
    }
}

std::string format_tables(const std::vector<CellSummary>& cells) {
    std::vector<std::pair<std::size_t, std::size_t>> grid;
    std::vector<std::string> methods;
    std::map<std::tuple<std::size_t, std::size_t, std::string>, const CellSummary*> lookup;
    for (const auto& c : cells) {
        const std::pair<std::size_t, std::size_t> nm{c.n, c.m};
        if (std::find(grid.begin(), grid.end(), nm) == grid.end()) grid.push_back(nm);
        if (std::find(methods.begin(), methods.end(), c.method) == methods.end()) methods.push_back(c.method);
        lookup[{c.n, c.m, c.method}] = &c;
    }

    struct Table {
        const char* title;
        Stat CellSummary::*field;
    };
    const Table tables[] = {{"Time(s)", &CellSummary::cpu_time_s},
                            {"Errors", &CellSummary::final_error},
                            {"Iterations", &CellSummary::iterations}};

    std::ostringstream out;
    for (const auto& table : tables) {
        std::vector<std::vector<std::string>> rows;
        std::vector<std::string> header{"n", "m"};
        header.insert(header.end(), methods.begin(), methods.end());
        rows.push_back(header);
        for (const auto& [n, m] : grid) {
            std::vector<std::string> row{std::to_string(n), std::to_string(m)};
            for (const auto& method : methods) {
                auto it = lookup.find({n, m, method});
                row.push_back(it == lookup.end() ? "-" : median_max_cell(it->second->*table.field));
            }
            rows.push_back(std::move(row));
        }
        std::vector<std::size_t> width(header.size(), 0);
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
        }
        if (&table != &tables[0]) out << '\n';
        out << table.title << '\n';
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (c) out << "  ";
                out << std::string(width[c] - row[c].size(), ' ') << row[c];
            }
            out << '\n';
        }
    }
    return out.str();
}

}  // namespace ccrm
