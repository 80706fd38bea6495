#include "sasrl/env_berzerk.hpp"

#include <cmath>
#include <limits>

namespace sasrl {

double PatrolLoop::perimeter() const {
    double p = 0.0;
    for (size_t i = 0; i < waypoints.size(); ++i)
        p += dist(waypoints[i], waypoints[(i + 1) % waypoints.size()]);
    return p;
}

Point2 PatrolLoop::point_at(double arc) const {
    double total = perimeter();
    arc = std::fmod(arc, total);
    if (arc < 0.0) arc += total;
    for (size_t i = 0; i < waypoints.size(); ++i) {
        const Point2& a = waypoints[i];
        const Point2& b = waypoints[(i + 1) % waypoints.size()];
        double len = dist(a, b);
        if (arc <= len || i + 1 == waypoints.size()) {
            double t = len > 0.0 ? std::min(1.0, arc / len) : 0.0;
            return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
        }
        arc -= len;
    }
    return waypoints.front();
}

double PatrolLoop::nearest_arc(const Point2& p) const {
    double best_d2 = std::numeric_limits<double>::infinity();
    double best_arc = 0.0;
    double base = 0.0;
    for (size_t i = 0; i < waypoints.size(); ++i) {
        const Point2& a = waypoints[i];
        const Point2& b = waypoints[(i + 1) % waypoints.size()];
        double ex = b.x - a.x, ey = b.y - a.y;
        double len2 = ex * ex + ey * ey;
        double t = 0.0;
        if (len2 > 0.0) {
            t = ((p.x - a.x) * ex + (p.y - a.y) * ey) / len2;
            t = std::min(1.0, std::max(0.0, t));
        }
        Point2 q{a.x + t * ex, a.y + t * ey};
        double d2 = dist2(p, q);
        if (d2 < best_d2) {
            best_d2 = d2;
            best_arc = base + t * std::sqrt(len2);
        }
        base += std::sqrt(len2);
    }
    return best_arc;
}

BerzerkWorld::BerzerkWorld(BerzerkConfig cfg, uint64_t seed) : cfg_(std::move(cfg)), rng_(seed) {
    if (cfg_.patrol_loops.empty()) throw std::invalid_argument("berzerk: needs at least one robot");
    reset();
}

Box BerzerkWorld::action_box() const {
    double d = cfg_.move_limit;
    return {{-d, -d}, {d, d}};
}

Box BerzerkWorld::state_box() const {
    double L = cfg_.side_length;
    Box box;
    box.low = {0.0, 0.0};
    box.high = {L, L};
    for (int i = 0; i < robot_count(); ++i) {
        box.low.push_back(cfg_.dead_sentinel);
        box.low.push_back(cfg_.dead_sentinel);
        box.high.push_back(L);
        box.high.push_back(L);
    }
    box.low.push_back(0.0);
    box.low.push_back(0.0);
    box.high.push_back(L);
    box.high.push_back(L);
    return box;
}

void BerzerkWorld::seed(uint64_t s) { rng_ = Rng(s); }

Point2 BerzerkWorld::robot_pos(const Robot& r, int idx) const {
    if (!r.alive) return {cfg_.dead_sentinel, cfg_.dead_sentinel};
    return cfg_.patrol_loops[idx].point_at(r.arc);
}

EnvState BerzerkWorld::snapshot() const {
    EnvState s;
    s.values = {agent_.x, agent_.y};
    for (int i = 0; i < robot_count(); ++i) {
        Point2 p = robot_pos(robots_[i], i);
        s.values.push_back(p.x);
        s.values.push_back(p.y);
    }
    s.values.push_back(cfg_.exit_pos.x);
    s.values.push_back(cfg_.exit_pos.y);
    return s;
}

EnvState BerzerkWorld::reset() {
    robots_.assign(cfg_.patrol_loops.size(), Robot{});
    for (size_t i = 0; i < robots_.size(); ++i)
        robots_[i].arc = rng_.uniform(0.0, cfg_.patrol_loops[i].perimeter());
    for (int tries = 0; tries < 10000; ++tries) {
        Point2 p{rng_.uniform(cfg_.start_low.x, cfg_.start_high.x),
                 rng_.uniform(cfg_.start_low.y, cfg_.start_high.y)};
        bool clear = dist(p, cfg_.exit_pos) > cfg_.exit_radius;
        for (int i = 0; i < robot_count() && clear; ++i)
            clear = dist(p, robot_pos(robots_[i], i)) > 2.0 * cfg_.robot_radius;
        if (clear) {
            agent_ = p;
            return snapshot();
        }
    }
    throw std::runtime_error("berzerk: could not place the agent in the start region");
}

ActionVec BerzerkWorld::project_action(const ActionVec& a) const {
    if (a.width() != 2) throw std::invalid_argument("berzerk: action width must be 2");
    double d = cfg_.move_limit;
    double x = std::min(d, std::max(-d, a.values[0]));
    double y = std::min(d, std::max(-d, a.values[1]));
    double norm = std::sqrt(x * x + y * y);
    if (norm > d && norm > 0.0) {
        x *= d / norm;
        y *= d / norm;
    }
    return {{x, y}};
}

Point2 BerzerkWorld::wall_truncate(const Point2& from, const Point2& to) const {
    double t_min = 1.0;
    bool hit = false;
    for (const WallSegment& w : cfg_.walls) {
        if (auto t = segment_segment_hit(from, to, w.a, w.b)) {
            if (*t < t_min) {
                t_min = *t;
                hit = true;
            }
        }
    }
    if (!hit) return to;
    double t = std::max(0.0, t_min - 1e-6);  // stop just short of the wall
    return {from.x + t * (to.x - from.x), from.y + t * (to.y - from.y)};
}

StepResult BerzerkWorld::step(const ActionVec& raw) {
    ActionVec a = project_action(raw);
    double L = cfg_.side_length;
    Point2 from = agent_;
    Point2 target{std::min(L, std::max(0.0, from.x + a.values[0])),
                  std::min(L, std::max(0.0, from.y + a.values[1]))};
    agent_ = wall_truncate(from, target);

    StepResult out;
    out.r = cfg_.time_penalty;

    // one bullet along the direction of travel; a zero action fires nothing
    double ax = a.values[0], ay = a.values[1];
    double norm = std::sqrt(ax * ax + ay * ay);
    if (norm > 1e-12) {
        double ux = ax / norm, uy = ay / norm;
        // range limited by the arena boundary
        double range = 2.0 * L;
        Point2 ray_end{agent_.x + ux * range, agent_.y + uy * range};
        double wall_t = 1.0;
        for (const WallSegment& w : cfg_.walls) {
            if (auto t = segment_segment_hit(agent_, ray_end, w.a, w.b))
                wall_t = std::min(wall_t, *t);
        }
        int first_robot = -1;
        double first_t = wall_t;
        for (int i = 0; i < robot_count(); ++i) {
            if (!robots_[i].alive) continue;
            Point2 rp = robot_pos(robots_[i], i);
            if (auto t = segment_disc_hit(agent_, ray_end, rp, cfg_.robot_radius)) {
                if (*t <= first_t) {
                    first_t = *t;
                    first_robot = i;
                }
            }
        }
        if (first_robot >= 0) {
            robots_[first_robot].alive = false;
            out.r += cfg_.reward_kill;
        }
    }

    // robots advance one patrol step
    for (size_t i = 0; i < robots_.size(); ++i)
        if (robots_[i].alive) robots_[i].arc += cfg_.robot_speed;

    // collisions kill the agent; death takes precedence over the exit
    bool death = false;
    for (int i = 0; i < robot_count() && !death; ++i)
        if (robots_[i].alive && dist(agent_, robot_pos(robots_[i], i)) <= cfg_.robot_radius)
            death = true;

    if (death) {
        out.r += cfg_.reward_death;
        out.done = true;
    } else if (dist(agent_, cfg_.exit_pos) <= cfg_.exit_radius) {
        out.r += cfg_.reward_exit;
        out.done = true;
    }
    out.s_next = snapshot();
    return out;
}

std::vector<EnvState> BerzerkWorld::feasible_candidates(const EnvState& s, int n) const {
    if (s.width() != state_width())
        throw std::invalid_argument("berzerk: candidate query with wrong state width");
    double L = cfg_.side_length;
    double d = cfg_.move_limit;
    Point2 agent{s.values[0], s.values[1]};

    // robots propagate deterministically no matter which move the agent takes
    Vec rest;
    for (int i = 0; i < robot_count(); ++i) {
        Point2 rp{s.values[2 + 2 * i], s.values[3 + 2 * i]};
        if (rp.x == cfg_.dead_sentinel && rp.y == cfg_.dead_sentinel) {
            rest.push_back(rp.x);
            rest.push_back(rp.y);
        } else {
            const PatrolLoop& loop = cfg_.patrol_loops[i];
            Point2 next = loop.point_at(loop.nearest_arc(rp) + cfg_.robot_speed);
            rest.push_back(next.x);
            rest.push_back(next.y);
        }
    }
    rest.push_back(s.values[s.values.size() - 2]);
    rest.push_back(s.values[s.values.size() - 1]);

    std::vector<EnvState> out;
    out.reserve(static_cast<size_t>(n));
    for (const Point2& p : unit_disc_pattern(n)) {
        Point2 target{std::min(L, std::max(0.0, agent.x + d * p.x)),
                      std::min(L, std::max(0.0, agent.y + d * p.y))};
        Point2 reach = wall_truncate(agent, target);
        EnvState cand;
        cand.values = {reach.x, reach.y};
        cand.values.insert(cand.values.end(), rest.begin(), rest.end());
        out.push_back(std::move(cand));
    }
    return out;
}

std::optional<ActionVec> BerzerkWorld::inverse_action(const EnvState& s,
                                                      const EnvState& s_next) const {
    double dx = s_next.values[0] - s.values[0];
    double dy = s_next.values[1] - s.values[1];
    if (std::sqrt(dx * dx + dy * dy) > cfg_.move_limit + 1e-9) return std::nullopt;
    return ActionVec{{dx, dy}};
}

int BerzerkWorld::alive_robots() const {
    int n = 0;
    for (const Robot& r : robots_)
        if (r.alive) ++n;
    return n;
}

}  // namespace sasrl
