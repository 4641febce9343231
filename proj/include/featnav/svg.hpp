#pragma once

// Minimal SVG emission for batch plots: trajectory overlays, field maps,
// sweep grids and lambda traces. No display dependency; files only.

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "featnav/field.hpp"
#include "featnav/scenario.hpp"
#include "featnav/sim.hpp"

namespace featnav::svg {

class SvgWriter {
public:
    SvgWriter(double width, double height) : width_(width), height_(height) {
        body_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
              << height_ << "\" viewBox=\"0 0 " << width_ << " " << height_ << "\">\n";
    }

    void rect(double x, double y, double w, double h, const std::string& fill,
              double opacity = 1.0) {
        body_ << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w << "\" height=\"" << h
              << "\" fill=\"" << fill << "\" fill-opacity=\"" << opacity << "\"/>\n";
    }

    void circle(double cx, double cy, double r, const std::string& fill, double opacity = 1.0) {
        body_ << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << r << "\" fill=\"" << fill
              << "\" fill-opacity=\"" << opacity << "\"/>\n";
    }

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double stroke_width = 1.0) {
        body_ << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2 << "\" y2=\"" << y2
              << "\" stroke=\"" << stroke << "\" stroke-width=\"" << stroke_width << "\"/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                  double stroke_width = 1.0) {
        body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\""
              << stroke_width << "\" points=\"";
        for (const auto& [x, y] : pts) body_ << x << ',' << y << ' ';
        body_ << "\"/>\n";
    }

    void arrow(double x1, double y1, double x2, double y2, const std::string& stroke,
               double stroke_width = 1.0) {
        line(x1, y1, x2, y2, stroke, stroke_width);
        const double dx = x2 - x1, dy = y2 - y1;
        const double len = std::hypot(dx, dy);
        if (len < 1e-9) return;
        const double ux = dx / len, uy = dy / len;
        const double head = std::min(4.0, 0.4 * len);
        line(x2, y2, x2 - head * (ux + 0.5 * uy), y2 - head * (uy - 0.5 * ux), stroke, stroke_width);
        line(x2, y2, x2 - head * (ux - 0.5 * uy), y2 - head * (uy + 0.5 * ux), stroke, stroke_width);
    }

    void text(double x, double y, const std::string& content, double size = 12.0,
              const std::string& fill = "#333") {
        body_ << "<text x=\"" << x << "\" y=\"" << y << "\" font-size=\"" << size
              << "\" font-family=\"sans-serif\" fill=\"" << fill << "\">" << content
              << "</text>\n";
    }

    void save(const std::string& path) {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write svg: " + path);
        out << body_.str() << "</svg>\n";
        if (!out) throw std::runtime_error("write failed: " + path);
    }

private:
    double width_;
    double height_;
    std::ostringstream body_;
};

namespace detail {

// Affine map from world rectangle to a padded viewport.
struct WorldFrame {
    sim::Rect world;
    double scale;
    double pad;

    WorldFrame(const sim::Rect& w, double px_per_m, double pad_px)
        : world(w), scale(px_per_m), pad(pad_px) {}

    double x(double wx) const { return pad + (wx - world.x0) * scale; }
    // flip: world y up, svg y down
    double y(double wy) const { return pad + (world.y1 - wy) * scale; }
    double width() const { return 2 * pad + world.width() * scale; }
    double height() const { return 2 * pad + world.height() * scale; }
};

}  // namespace detail

// Trajectories over the feature layout; one polyline per trial.
inline void plot_trajectories(const std::string& path, const sim::WorldScenario& world,
                              const std::vector<sim::TrajectoryLog>& logs) {
    const detail::WorldFrame f(world.bounds, 60.0, 20.0);
    SvgWriter w(f.width(), f.height());
    w.rect(0, 0, f.width(), f.height(), "#ffffff");
    for (const Vec2& p : world.features) w.circle(f.x(p.x), f.y(p.y), 1.0, "#9bbf9b", 0.7);
    const std::vector<std::string> palette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                           "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
    for (size_t i = 0; i < logs.size(); ++i) {
        std::vector<std::pair<double, double>> pts;
        pts.reserve(logs[i].steps.size());
        for (const sim::StepRecord& s : logs[i].steps)
            pts.push_back({f.x(s.true_pos.x), f.y(s.true_pos.y)});
        if (!pts.empty()) w.polyline(pts, palette[i % palette.size()], 1.5);
    }
    w.rect(f.x(world.start.x) - 5, f.y(world.start.y) - 5, 10, 10, "#d62728");
    w.rect(f.x(world.goal.x) - 5, f.y(world.goal.y) - 5, 10, 10, "#2ca02c");
    w.text(10, 14, world.name);
    w.save(path);
}

// Charge heat plus the raw force field with goal-/feature-friendly shading.
inline void plot_field_map(const std::string& path, const FieldMap& map,
                           std::span<const Charge> charges, PixelVec p_o, PixelVec v_g_img,
                           int image_width, int image_height) {
    const double scale = 0.8;
    SvgWriter w(image_width * scale, image_height * scale);
    const GridSpec& g = map.grid;
    // region shading: yellow goal-friendly, red feature-friendly
    for (int iv = 0; iv < g.nv; ++iv) {
        for (int iu = 0; iu < g.nu; ++iu) {
            const auto& cell = map.at(iu, iv);
            const bool goal = cell.region == RegionClass::GoalFriendly;
            w.rect((g.u0 + (iu - 0.5) * g.du) * scale, (g.v0 + (iv - 0.5) * g.dv) * scale,
                   g.du * scale, g.dv * scale, goal ? "#f5e663" : "#e06050", 0.35);
        }
    }
    // arrows of the unnormalized field
    double max_norm = 0.0;
    for (const auto& cell : map.cells) max_norm = std::max(max_norm, norm(cell.force));
    const double arrow_len = 0.45 * std::min(g.du, g.dv) * scale;
    for (int iv = 0; iv < g.nv; ++iv) {
        for (int iu = 0; iu < g.nu; ++iu) {
            const auto& cell = map.at(iu, iv);
            const double n = norm(cell.force);
            if (n <= 0.0 || max_norm <= 0.0) continue;
            const double cx = (g.u0 + iu * g.du) * scale;
            const double cy = (g.v0 + iv * g.dv) * scale;
            const double len = arrow_len * (0.25 + 0.75 * n / max_norm);
            w.arrow(cx, cy, cx + len * cell.force.fx / n, cy + len * cell.force.fy / n, "#333333",
                    0.8);
        }
    }
    // charges colored by energy (blue attractive, green neutral)
    for (const Charge& c : charges) {
        const PixelVec p = p_o + c.offset;
        const std::string color = c.energy > 0.0 ? "#1f4fd6" : "#3aa35c";
        w.circle(p.u * scale, p.v * scale, 2.5, color, 0.3 + 0.7 * c.energy);
    }
    // goal direction from the optical center
    const double gn = norm(v_g_img);
    if (gn > 0.0)
        w.arrow(p_o.u * scale, p_o.v * scale, (p_o.u + 60.0 * v_g_img.u / gn) * scale,
                (p_o.v + 60.0 * v_g_img.v / gn) * scale, "#1f77b4", 2.0);
    w.save(path);
}

// lambda against time.
inline void plot_lambda_trace(const std::string& path,
                              const std::vector<std::pair<double, double>>& trace) {
    if (trace.empty()) throw std::invalid_argument("plot_lambda_trace: empty trace");
    const double width = 640.0, height = 240.0, pad = 36.0;
    const double t_max = std::max(trace.back().first, 1e-9);
    SvgWriter w(width, height);
    w.rect(0, 0, width, height, "#ffffff");
    w.line(pad, height - pad, width - 8, height - pad, "#333", 1.0);
    w.line(pad, height - pad, pad, 8, "#333", 1.0);
    std::vector<std::pair<double, double>> pts;
    pts.reserve(trace.size());
    for (const auto& [t, lam] : trace)
        pts.push_back({pad + t / t_max * (width - pad - 12),
                       height - pad - lam * (height - pad - 16)});
    w.polyline(pts, "#1f77b4", 1.5);
    w.text(width / 2 - 20, height - 8, "t [s]");
    w.text(6, 16, "lambda");
    w.save(path);
}

}  // namespace featnav::svg
