#include "kmlab/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace kmlab {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

void write_vec(std::ostream& os, const Vec& v) {
    os << '[';
    for (int j = 0; j < v.dim(); ++j) os << (j ? "," : "") << fmt17(v[j]);
    os << ']';
}

void write_centers(std::ostream& os, const std::vector<std::optional<Vec>>& centers) {
    os << '[';
    for (std::size_t i = 0; i < centers.size(); ++i) {
        if (i) os << ',';
        if (centers[i])
            write_vec(os, *centers[i]);
        else
            os << "null";
    }
    os << ']';
}

void write_ints(std::ostream& os, const std::vector<int>& v) {
    os << '[';
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << ']';
}

void write_state(std::ostream& os, const ClusteringState& st) {
    os << "{\"assignment\":";
    write_ints(os, st.assignment);
    os << ",\"centers\":";
    write_centers(os, st.centers);
    os << ",\"potential\":" << fmt17(st.potential) << "}";
}

Vec parse_vec(const nlohmann::json& j) {
    Vec v;
    v.x.reserve(j.size());
    for (const auto& c : j) v.x.push_back(c.get<double>());
    return v;
}

ClusteringState parse_state(const nlohmann::json& j) {
    ClusteringState st;
    st.assignment = j.at("assignment").get<std::vector<int>>();
    for (const auto& c : j.at("centers")) {
        if (c.is_null())
            st.centers.push_back(std::nullopt);
        else
            st.centers.push_back(parse_vec(c));
    }
    st.potential = j.at("potential").get<double>();
    return st;
}

} // namespace

void write_trace(std::ostream& os, const Trace& trace) {
    os << "{\"id\":\"" << trace.id << "\",";
    os << "\"n\":" << trace.n << ",\"d\":" << trace.d << ",\"k\":" << trace.k_initial
       << ",\"k_final\":" << trace.k_final << ",";
    os << "\"sigma\":" << fmt17(trace.sigma) << ",\"seed\":" << trace.seed << ",";
    os << "\"cube_side\":" << fmt17(trace.cube_side)
       << ",\"in_cube\":" << (trace.in_cube ? "true" : "false") << ",";
    os << "\"max_iterations\":" << trace.max_iterations << ",";
    os << "\"termination\":\""
       << (trace.termination == Termination::converged ? "converged" : "max_iterations")
       << "\",\n";
    os << "\"points\":[";
    for (std::size_t i = 0; i < trace.points.size(); ++i) {
        if (i) os << ',';
        write_vec(os, trace.points[i]);
    }
    os << "],\n\"initial\":";
    write_state(os, trace.initial);
    os << ",\n\"iterations\":[";
    for (std::size_t r = 0; r < trace.records.size(); ++r) {
        const IterationRecord& rec = trace.records[r];
        if (r) os << ',';
        os << "\n{\"index\":" << rec.index << ",\"assignment\":";
        write_ints(os, rec.post.assignment);
        os << ",\"centers\":";
        write_centers(os, rec.post.centers);
        os << ",\"potential\":" << fmt17(rec.post.potential) << ",\"reassignments\":[";
        for (std::size_t i = 0; i < rec.reassignments.size(); ++i) {
            const Reassignment& m = rec.reassignments[i];
            os << (i ? "," : "") << '[' << m.point << ',' << m.from << ',' << m.to << ']';
        }
        os << "],\"assignment_drop\":" << fmt17(rec.assignment_drop)
           << ",\"move_drop\":" << fmt17(rec.move_drop) << ",\"removed\":";
        write_ints(os, rec.removed);
        os << ",\"point_terms\":[";
        for (std::size_t i = 0; i < rec.point_terms.size(); ++i)
            os << (i ? "," : "") << fmt17(rec.point_terms[i]);
        os << "],\"cluster_terms\":[";
        for (std::size_t i = 0; i < rec.cluster_terms.size(); ++i)
            os << (i ? "," : "") << '[' << rec.cluster_terms[i].first << ','
               << fmt17(rec.cluster_terms[i].second) << ']';
        os << "]}";
    }
    os << "\n]}\n";
}

void write_trace_file(const std::string& path, const Trace& trace) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write trace file: " + path);
    write_trace(f, trace);
}

Trace read_trace(std::istream& is) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("malformed trace: ") + e.what());
    }
    try {
        Trace tr;
        tr.id = j.at("id").get<std::string>();
        tr.n = j.at("n").get<int>();
        tr.d = j.at("d").get<int>();
        tr.k_initial = j.at("k").get<int>();
        tr.k_final = j.at("k_final").get<int>();
        tr.sigma = j.at("sigma").get<double>();
        tr.seed = j.at("seed").get<std::uint64_t>();
        tr.cube_side = j.at("cube_side").get<double>();
        tr.in_cube = j.at("in_cube").get<bool>();
        tr.max_iterations = j.at("max_iterations").get<long>();
        tr.termination = j.at("termination").get<std::string>() == "converged"
                             ? Termination::converged
                             : Termination::max_iterations;
        for (const auto& p : j.at("points")) tr.points.push_back(parse_vec(p));
        if (static_cast<int>(tr.points.size()) != tr.n)
            throw std::runtime_error("point count mismatch");
        tr.initial = parse_state(j.at("initial"));

        const ClusteringState* prev = &tr.initial;
        for (const auto& it : j.at("iterations")) {
            IterationRecord rec;
            rec.index = it.at("index").get<int>();
            rec.pre = *prev;
            rec.post.assignment = it.at("assignment").get<std::vector<int>>();
            for (const auto& c : it.at("centers")) {
                if (c.is_null())
                    rec.post.centers.push_back(std::nullopt);
                else
                    rec.post.centers.push_back(parse_vec(c));
            }
            rec.post.potential = it.at("potential").get<double>();
            for (const auto& m : it.at("reassignments"))
                rec.reassignments.push_back(
                    {m.at(0).get<int>(), m.at(1).get<int>(), m.at(2).get<int>()});
            rec.assignment_drop = it.at("assignment_drop").get<double>();
            rec.move_drop = it.at("move_drop").get<double>();
            rec.removed = it.at("removed").get<std::vector<int>>();
            rec.point_terms = it.at("point_terms").get<std::vector<double>>();
            for (const auto& t : it.at("cluster_terms"))
                rec.cluster_terms.emplace_back(t.at(0).get<int>(), t.at(1).get<double>());
            if (static_cast<int>(rec.post.assignment.size()) != tr.n)
                throw std::runtime_error("assignment length mismatch");
            tr.records.push_back(std::move(rec));
            prev = &tr.records.back().post;
        }
        return tr;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("malformed trace: ") + e.what());
    }
}

Trace read_trace_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open trace file: " + path);
    return read_trace(f);
}

} // namespace kmlab
