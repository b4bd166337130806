#include "aqc/checkpoint.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "aqc/common.hpp"

namespace aqc {

namespace {

constexpr char kMagic[9] = "AQCKPT01";

class Writer {
public:
    explicit Writer(std::ostream& os) : os_(os) {}

    void u8(std::uint8_t v) { os_.write(reinterpret_cast<const char*>(&v), 1); }
    void u64(std::uint64_t v) { os_.write(reinterpret_cast<const char*>(&v), 8); }
    void f64(double v) { os_.write(reinterpret_cast<const char*>(&v), 8); }
    void str(const std::string& s) {
        u64(s.size());
        os_.write(s.data(), static_cast<std::streamsize>(s.size()));
    }
    void vec(const std::vector<double>& v) {
        u64(v.size());
        for (double x : v) f64(x);
    }

private:
    std::ostream& os_;
};

class Reader {
public:
    explicit Reader(std::istream& is) : is_(is) {}

    std::uint8_t u8() {
        std::uint8_t v = 0;
        is_.read(reinterpret_cast<char*>(&v), 1);
        check();
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v = 0;
        is_.read(reinterpret_cast<char*>(&v), 8);
        check();
        return v;
    }
    double f64() {
        double v = 0;
        is_.read(reinterpret_cast<char*>(&v), 8);
        check();
        return v;
    }
    std::string str() {
        std::uint64_t n = u64();
        if (n > (1ull << 30)) throw std::runtime_error("corrupt checkpoint string");
        std::string s(n, '\0');
        is_.read(s.data(), static_cast<std::streamsize>(n));
        check();
        return s;
    }
    std::vector<double> vec() {
        std::uint64_t n = u64();
        if (n > (1ull << 30)) throw std::runtime_error("corrupt checkpoint vector");
        std::vector<double> v(n);
        for (auto& x : v) x = f64();
        return v;
    }

private:
    void check() {
        if (!is_) throw std::runtime_error("truncated checkpoint");
    }
    std::istream& is_;
};

void write_surrogate(Writer& w, const SurrogateState& s) {
    w.u64(s.betas.size());
    for (const cplx& b : s.betas) {
        w.f64(b.real());
        w.f64(b.imag());
    }
    w.u64(static_cast<std::uint64_t>(static_cast<std::int64_t>(s.leader)));
    w.f64(s.hysteresis);
}

SurrogateState read_surrogate(Reader& r) {
    SurrogateState s;
    std::uint64_t n = r.u64();
    s.betas.resize(n);
    for (auto& b : s.betas) {
        double re = r.f64();
        double im = r.f64();
        b = cplx(re, im);
    }
    s.leader = static_cast<int>(static_cast<std::int64_t>(r.u64()));
    s.hysteresis = r.f64();
    return s;
}

}  // namespace

void write_checkpoint(const std::string& path, const Checkpoint& cp) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write checkpoint '" + path + "'");
    os.write(kMagic, 8);

    Writer w(os);
    w.str(cp.version);
    w.u64(cp.config_hash);

    const TwoStageState& s = cp.state;
    w.u8(static_cast<std::uint8_t>(s.phase));
    w.u64(s.attempt);
    w.u64(s.iteration);
    w.u64(s.stage_iteration);
    w.vec(s.angles);

    w.vec(s.adam.m);
    w.vec(s.adam.v);
    w.u64(s.adam.t);
    w.f64(s.adam.cfg.lr);
    w.f64(s.adam.cfg.beta1);
    w.f64(s.adam.cfg.beta2);
    w.f64(s.adam.cfg.eps);

    const LbfgsMemory& m = s.lbfgs;
    w.u64(m.s_list.size());
    for (std::size_t i = 0; i < m.s_list.size(); ++i) {
        w.vec(m.s_list[i]);
        w.vec(m.y_list[i]);
        w.f64(m.rho_list[i]);
    }
    w.vec(m.x);
    w.vec(m.grad);
    w.f64(m.cost);
    w.u64(m.iter);
    w.u64(m.stall_count);
    w.f64(m.stall_ref_cost);
    w.u8(m.primed ? 1 : 0);

    w.u8(static_cast<std::uint8_t>(s.schedule.mode));
    w.f64(s.schedule.w);
    w.f64(s.schedule.ema_mix);
    w.f64(s.schedule.ema_keep);

    write_surrogate(w, s.surrogate);

    std::ostringstream rng_text;
    s.rng.save(rng_text);
    w.str(rng_text.str());

    w.vec(s.best_angles);
    w.f64(s.best_cost);
    w.u8(s.stalled ? 1 : 0);
    w.u8(s.converged ? 1 : 0);
    w.u64(s.degenerate_events);
    w.f64(s.stall_ref);
    w.u64(s.stall_count);
    w.u8(s.attempt_started ? 1 : 0);
    if (!os) throw std::runtime_error("failed writing checkpoint '" + path + "'");
}

Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read checkpoint '" + path + "'");
    char magic[8];
    is.read(magic, 8);
    if (!is || std::string(magic, 8) != std::string(kMagic, 8))
        throw std::runtime_error("'" + path + "' is not a checkpoint file");

    Reader r(is);
    Checkpoint cp;
    cp.version = r.str();
    if (cp.version != kVersion)
        throw std::runtime_error("checkpoint version '" + cp.version +
                                 "' does not match this build ('" + kVersion + "')");
    cp.config_hash = r.u64();

    TwoStageState& s = cp.state;
    s.phase = static_cast<TwoStageState::Phase>(r.u8());
    s.attempt = r.u64();
    s.iteration = r.u64();
    s.stage_iteration = r.u64();
    s.angles = r.vec();

    s.adam.m = r.vec();
    s.adam.v = r.vec();
    s.adam.t = r.u64();
    s.adam.cfg.lr = r.f64();
    s.adam.cfg.beta1 = r.f64();
    s.adam.cfg.beta2 = r.f64();
    s.adam.cfg.eps = r.f64();

    std::uint64_t pairs = r.u64();
    for (std::uint64_t i = 0; i < pairs; ++i) {
        s.lbfgs.s_list.push_back(r.vec());
        s.lbfgs.y_list.push_back(r.vec());
        s.lbfgs.rho_list.push_back(r.f64());
    }
    s.lbfgs.x = r.vec();
    s.lbfgs.grad = r.vec();
    s.lbfgs.cost = r.f64();
    s.lbfgs.iter = r.u64();
    s.lbfgs.stall_count = r.u64();
    s.lbfgs.stall_ref_cost = r.f64();
    s.lbfgs.primed = r.u8() != 0;

    s.schedule.mode = static_cast<WeightSchedule::Mode>(r.u8());
    s.schedule.w = r.f64();
    s.schedule.ema_mix = r.f64();
    s.schedule.ema_keep = r.f64();

    s.surrogate = read_surrogate(r);

    std::istringstream rng_text(r.str());
    s.rng.load(rng_text);

    s.best_angles = r.vec();
    s.best_cost = r.f64();
    s.stalled = r.u8() != 0;
    s.converged = r.u8() != 0;
    s.degenerate_events = r.u64();
    s.stall_ref = r.f64();
    s.stall_count = r.u64();
    s.attempt_started = r.u8() != 0;
    return cp;
}

}  // namespace aqc
