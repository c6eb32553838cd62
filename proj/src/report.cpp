#include "affvqa/evalkit.hpp"

#include <cstdio>
#include <sstream>

namespace affvqa::evalkit {

namespace {

// Hand-rolled emission keeps reports byte-identical across runs and pins
// the 4-decimal rendering of every floating-point field.
std::string fmt4(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

} // namespace

void EvalReport::finalize() {
    average.clear();
    if (rows.empty()) return;
    for (const auto& metric : metric_names) {
        double sum = 0;
        std::size_t n = 0;
        for (const auto& [category, values] : rows) {
            auto it = values.find(metric);
            if (it != values.end()) {
                sum += it->second;
                ++n;
            }
        }
        if (n > 0) average[metric] = sum / static_cast<double>(n);
    }
}

std::string EvalReport::to_json_text() const {
    std::ostringstream out;
    out << "{\n  \"task\": \"" << json_escape(task) << "\",\n";
    out << "  \"metrics\": [";
    for (std::size_t i = 0; i < metric_names.size(); ++i)
        out << (i ? ", " : "") << '"' << json_escape(metric_names[i]) << '"';
    out << "],\n  \"categories\": {\n";
    std::size_t row = 0;
    for (const auto& [category, values] : rows) {
        out << "    \"" << json_escape(category) << "\": {";
        for (std::size_t i = 0; i < metric_names.size(); ++i) {
            auto it = values.find(metric_names[i]);
            out << (i ? ", " : "") << '"' << json_escape(metric_names[i]) << "\": "
                << (it != values.end() ? fmt4(it->second) : "null");
        }
        out << '}' << (++row < rows.size() ? "," : "") << '\n';
    }
    out << "  },\n  \"average\": {";
    for (std::size_t i = 0; i < metric_names.size(); ++i) {
        auto it = average.find(metric_names[i]);
        out << (i ? ", " : "") << '"' << json_escape(metric_names[i]) << "\": "
            << (it != average.end() ? fmt4(it->second) : "null");
    }
    out << "},\n  \"unparseable\": " << unparseable << ",\n  \"notes\": [";
    for (std::size_t i = 0; i < notes.size(); ++i)
        out << (i ? ", " : "") << '"' << json_escape(notes[i]) << '"';
    out << "]\n}\n";
    return out.str();
}

std::string EvalReport::to_csv_text() const {
    std::ostringstream out;
    out << "category";
    for (const auto& metric : metric_names) out << ',' << metric;
    out << '\n';
    for (const auto& [category, values] : rows) {
        out << category;
        for (const auto& metric : metric_names) {
            auto it = values.find(metric);
            out << ',' << (it != values.end() ? fmt4(it->second) : "");
        }
        out << '\n';
    }
    out << "AVG";
    for (const auto& metric : metric_names) {
        auto it = average.find(metric);
        out << ',' << (it != average.end() ? fmt4(it->second) : "");
    }
    out << '\n';
    return out.str();
}

} // namespace affvqa::evalkit
