#pragma once

// File formats: trajectory CSV (one row per control step) and JSON records
// for metrics and run configuration. Doubles are written with 17 significant
// digits so parsed values match the originals bit for bit.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "featnav/sim.hpp"

namespace featnav::io {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline constexpr const char* kTrajectoryHeader =
    "t,true_x,true_y,est_x,est_y,vg_x,vg_y,vf_u,vf_v,cmd_x,cmd_y,lambda,n_f,region,local_min,lost";

inline void write_trajectory_csv(const std::string& path, const sim::TrajectoryLog& log) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write trajectory csv: " + path);
    out << kTrajectoryHeader << "\n";
    for (const sim::StepRecord& s : log.steps) {
        out << format_double(s.t) << ',' << format_double(s.true_pos.x) << ','
            << format_double(s.true_pos.y) << ',' << format_double(s.est_pos.x) << ','
            << format_double(s.est_pos.y) << ',' << format_double(s.v_g.vx) << ','
            << format_double(s.v_g.vy) << ',';
        if (s.v_f)
            out << format_double(s.v_f->u) << ',' << format_double(s.v_f->v) << ',';
        else
            out << "nan,nan,";
        out << format_double(s.command.vx) << ',' << format_double(s.command.vy) << ','
            << format_double(s.lambda) << ',' << s.n_f << ','
            << (s.region == RegionClass::GoalFriendly ? 'G' : 'F') << ','
            << (s.local_min ? 1 : 0) << ',' << (s.lost ? 1 : 0) << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline sim::TrajectoryLog read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read trajectory csv: " + path);
    std::string line;
    if (!std::getline(in, line) || line != kTrajectoryHeader)
        throw std::runtime_error("unexpected trajectory csv header in " + path);
    sim::TrajectoryLog log;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 16) throw std::runtime_error("malformed trajectory row in " + path);
        sim::StepRecord s;
        s.t = std::strtod(cells[0].c_str(), nullptr);
        s.true_pos = {std::strtod(cells[1].c_str(), nullptr), std::strtod(cells[2].c_str(), nullptr)};
        s.est_pos = {std::strtod(cells[3].c_str(), nullptr), std::strtod(cells[4].c_str(), nullptr)};
        s.v_g = {std::strtod(cells[5].c_str(), nullptr), std::strtod(cells[6].c_str(), nullptr)};
        const double vfu = std::strtod(cells[7].c_str(), nullptr);
        const double vfv = std::strtod(cells[8].c_str(), nullptr);
        if (!std::isnan(vfu) && !std::isnan(vfv)) s.v_f = PixelVec{vfu, vfv};
        s.command = {std::strtod(cells[9].c_str(), nullptr), std::strtod(cells[10].c_str(), nullptr)};
        s.lambda = std::strtod(cells[11].c_str(), nullptr);
        s.n_f = std::atoi(cells[12].c_str());
        s.region = cells[13] == "G" ? RegionClass::GoalFriendly : RegionClass::FeatureFriendly;
        s.local_min = cells[14] == "1";
        s.lost = cells[15] == "1";
        log.steps.push_back(s);
    }
    return log;
}

inline nlohmann::json metrics_to_json(const sim::EpisodeMetrics& m) {
    return {
        {"path_length", m.path_length},
        {"overhead_ratio", m.overhead_ratio},
        {"final_true_distance", m.final_true_distance},
        {"min_n_f", m.min_n_f},
        {"mean_n_f", m.mean_n_f},
        {"localized_fraction", m.localized_fraction},
        {"goal_success", m.goal_success},
        {"localization_success", m.localization_success},
        {"reached_goal_estimate", m.reached_goal_estimate},
        {"stalled", m.stalled},
        {"steps", m.steps},
        {"episode_seed", m.episode_seed},
    };
}

inline sim::EpisodeMetrics metrics_from_json(const nlohmann::json& j) {
    sim::EpisodeMetrics m;
    m.path_length = j.at("path_length").get<double>();
    m.overhead_ratio = j.at("overhead_ratio").get<double>();
    m.final_true_distance = j.at("final_true_distance").get<double>();
    m.min_n_f = j.at("min_n_f").get<int>();
    m.mean_n_f = j.at("mean_n_f").get<double>();
    m.localized_fraction = j.at("localized_fraction").get<double>();
    m.goal_success = j.at("goal_success").get<bool>();
    m.localization_success = j.at("localization_success").get<bool>();
    m.reached_goal_estimate = j.at("reached_goal_estimate").get<bool>();
    m.stalled = j.at("stalled").get<bool>();
    m.steps = j.at("steps").get<int>();
    m.episode_seed = j.at("episode_seed").get<std::uint64_t>();
    return m;
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read: " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

}  // namespace featnav::io
