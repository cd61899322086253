#include <fstream>
#include <iomanip>
#include <sstream>

#include "argyris/errors.hpp"
#include "argyris/multipatch.hpp"

namespace argyris {

namespace {

class Tokens {
public:
    explicit Tokens(const std::string& text)
    {
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos)
                line.erase(hash);
            std::istringstream ls(line);
            std::string tok;
            while (ls >> tok)
                toks_.push_back({tok, lineno});
        }
    }

    bool done() const { return pos_ >= toks_.size(); }

    std::string word()
    {
        if (done())
            throw ParseError("unexpected end of geometry file");
        return toks_[pos_++].text;
    }

    void expect(const std::string& kw)
    {
        const int line = this->line();
        const std::string w = word();
        if (w != kw)
            throw ParseError("line " + std::to_string(line) + ": expected '" + kw + "', found '" +
                             w + "'");
    }

    int integer()
    {
        const int line = this->line();
        const std::string w = word();
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(w, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != w.size() || w.empty())
            throw ParseError("line " + std::to_string(line) + ": expected integer, found '" + w +
                             "'");
        return v;
    }

    double real()
    {
        const int line = this->line();
        const std::string w = word();
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(w, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != w.size() || w.empty())
            throw ParseError("line " + std::to_string(line) + ": expected number, found '" + w +
                             "'");
        return v;
    }

    int line() const { return done() ? (toks_.empty() ? 0 : toks_.back().line) : toks_[pos_].line; }

private:
    struct Tok {
        std::string text;
        int line;
    };
    std::vector<Tok> toks_;
    std::size_t pos_ = 0;
};

} // namespace

MultiPatch parse_geometry(const std::string& text)
{
    Tokens t(text);
    t.expect("argyris-geometry");
    const int version = t.integer();
    if (version != 1)
        throw ParseError("unsupported geometry format version " + std::to_string(version));
    MultiPatch mp;
    t.expect("degree");
    mp.config.p = t.integer();
    t.expect("regularity");
    mp.config.r = t.integer();
    t.expect("elements");
    mp.config.n = t.integer();
    const UnivariateSpace sp = [&] {
        try {
            return UnivariateSpace(mp.config);
        } catch (const InvalidConfig& e) {
            throw ParseError(std::string("invalid space in header: ") + e.what());
        }
    }();
    const int N = sp.dim();

    t.expect("patches");
    const int K = t.integer();
    if (K < 1)
        throw ParseError("patch count must be positive");
    for (int k = 0; k < K; ++k) {
        t.expect("patch");
        const int id = t.integer();
        if (id != k)
            throw ParseError("patch ids must be 0..K-1 in order, found " + std::to_string(id));
        Patch P{sp, Eigen::MatrixXd(N, N), Eigen::MatrixXd(N, N)};
        for (int j2 = 0; j2 < N; ++j2)
            for (int j1 = 0; j1 < N; ++j1) {
                const int line = t.line();
                if (t.done())
                    throw DimensionMismatch("patch " + std::to_string(k) + " has fewer than " +
                                            std::to_string(N * N) + " control points");
                const std::string w = t.word();
                if (w == "patch" || w == "edges")
                    throw DimensionMismatch("patch " + std::to_string(k) + " has " +
                                            std::to_string(j2 * N + j1) +
                                            " control points, expected " +
                                            std::to_string(N * N) + " (line " +
                                            std::to_string(line) + ")");
                std::size_t used = 0;
                double x = 0;
                try {
                    x = std::stod(w, &used);
                } catch (const std::exception&) {
                    used = 0;
                }
                if (used != w.size())
                    throw ParseError("line " + std::to_string(line) + ": expected number, found '" +
                                     w + "'");
                P.X(j1, j2) = x;
                P.Y(j1, j2) = t.real();
            }
        mp.patches.push_back(std::move(P));
    }

    {
        const int line = t.line();
        const std::string w = t.word();
        if (w != "edges") {
            bool numeric = false;
            try {
                std::size_t used = 0;
                (void)std::stod(w, &used);
                numeric = used == w.size();
            } catch (const std::exception&) {
            }
            if (numeric)
                throw DimensionMismatch("patch " + std::to_string(K - 1) +
                                        " has more control points than " +
                                        std::to_string(N * N) + " (line " +
                                        std::to_string(line) + ")");
            throw ParseError("line " + std::to_string(line) + ": expected 'edges', found '" + w +
                             "'");
        }
    }
    const int E = t.integer();
    for (int i = 0; i < E; ++i) {
        t.expect("edge");
        EdgeRecord e;
        e.id = t.integer();
        const int line = t.line();
        const std::string kind = t.word();
        if (kind == "interface")
            e.kind = EdgeKind::Interface;
        else if (kind == "boundary")
            e.kind = EdgeKind::Boundary;
        else
            throw ParseError("line " + std::to_string(line) + ": unknown edge kind '" + kind + "'");
        const int count = e.kind == EdgeKind::Interface ? 2 : 1;
        for (int c = 0; c < count; ++c) {
            LocalIndex l;
            l.patch = t.integer();
            l.kappa = t.integer();
            e.locals.push_back(l);
        }
        mp.edges.push_back(e);
    }
    t.expect("vertices");
    const int V = t.integer();
    for (int i = 0; i < V; ++i) {
        t.expect("vertex");
        VertexRecord v;
        v.id = t.integer();
        const int line = t.line();
        const std::string kind = t.word();
        if (kind == "interior")
            v.kind = VertexKind::Interior;
        else if (kind == "boundary")
            v.kind = VertexKind::Boundary;
        else
            throw ParseError("line " + std::to_string(line) + ": unknown vertex kind '" + kind +
                             "'");
        const int count = t.integer();
        if (count < 1)
            throw ParseError("line " + std::to_string(line) + ": vertex needs at least one patch");
        for (int c = 0; c < count; ++c) {
            LocalIndex l;
            l.patch = t.integer();
            l.kappa = t.integer();
            v.patches.push_back(l);
        }
        mp.vertices.push_back(v);
    }
    t.expect("end");
    if (!t.done())
        throw ParseError("line " + std::to_string(t.line()) + ": trailing content after 'end'");

    mp.index();
    mp.validate();
    return mp;
}

MultiPatch load_geometry(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open geometry file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_geometry(ss.str());
}

std::string format_geometry(const MultiPatch& mp)
{
    std::ostringstream os;
    os << std::setprecision(17);
    os << "argyris-geometry 1\n";
    os << "degree " << mp.config.p << " regularity " << mp.config.r << " elements " << mp.config.n
       << "\n";
    os << "patches " << mp.patches.size() << "\n";
    for (std::size_t k = 0; k < mp.patches.size(); ++k) {
        const Patch& P = mp.patches[k];
        os << "patch " << k << "\n";
        for (int j2 = 0; j2 < P.n_ctrl(); ++j2)
            for (int j1 = 0; j1 < P.n_ctrl(); ++j1)
                os << P.X(j1, j2) << " " << P.Y(j1, j2) << "\n";
    }
    os << "edges " << mp.edges.size() << "\n";
    for (const EdgeRecord& e : mp.edges) {
        os << "edge " << e.id << (e.kind == EdgeKind::Interface ? " interface" : " boundary");
        for (const LocalIndex& l : e.locals)
            os << " " << l.patch << " " << l.kappa;
        os << "\n";
    }
    os << "vertices " << mp.vertices.size() << "\n";
    for (const VertexRecord& v : mp.vertices) {
        os << "vertex " << v.id << (v.kind == VertexKind::Interior ? " interior " : " boundary ")
           << v.patches.size();
        for (const LocalIndex& l : v.patches)
            os << " " << l.patch << " " << l.kappa;
        os << "\n";
    }
    os << "end\n";
    return os.str();
}

void save_geometry(const MultiPatch& mp, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot write geometry file '" + path + "'");
    out << format_geometry(mp);
}

} // namespace argyris
