#include "spxtrack/csv.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>

#include "spxtrack/error.hpp"

namespace spx {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a])))
        ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])))
        --b;
    return s.substr(a, b - a);
}

} // namespace

std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(trim(cur));
    return fields;
}

double csv_to_double(const std::string& field, const std::string& where) {
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (field.empty() || end != field.c_str() + field.size())
        throw ParseError("bad numeric field '" + field + "' at " + where);
    return v;
}

long csv_to_long(const std::string& field, const std::string& where) {
    char* end = nullptr;
    const long v = std::strtol(field.c_str(), &end, 10);
    if (field.empty() || end != field.c_str() + field.size())
        throw ParseError("bad integer field '" + field + "' at " + where);
    return v;
}

std::vector<std::vector<std::string>> csv_read_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw MissingInputError("cannot open " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (trim(line).empty())
            continue;
        auto fields = csv_split(line);
        if (first) {
            first = false;
            const std::string& f0 = fields[0];
            char* end = nullptr;
            std::strtod(f0.c_str(), &end);
            const bool numeric = !f0.empty() && end == f0.c_str() + f0.size();
            if (!numeric)
                continue; // header row
        }
        rows.push_back(std::move(fields));
    }
    return rows;
}

} // namespace spx
