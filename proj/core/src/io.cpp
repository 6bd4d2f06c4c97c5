#include "reachconf/io.hpp"

#include "reachconf/catalog.hpp"
#include "reachconf/gene.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace reachconf::io {

using Json = nlohmann::ordered_json;

namespace {

Json vec_json(const Vec& v)
{
    return std::vector<double>(v.data(), v.data() + v.size());
}

Vec json_vec(const Json& j, const char* what)
{
    if (!j.is_array())
        throw std::invalid_argument(std::string("expected array for ") + what);
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number())
            throw std::invalid_argument(std::string("non-numeric entry in ") + what);
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return v;
}

Json mat_json(const Mat& m)
{
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        rows.push_back(vec_json(m.row(i).transpose()));
    return rows;
}

// `cols` fixes the width of an empty matrix.
Mat json_mat(const Json& j, const char* what, Eigen::Index cols = 0)
{
    if (!j.is_array())
        throw std::invalid_argument(std::string("expected array of rows for ") + what);
    if (j.empty())
        return Mat::Zero(0, cols);
    const auto n = static_cast<Eigen::Index>(j.front().size());
    Mat m(static_cast<Eigen::Index>(j.size()), n);
    for (std::size_t i = 0; i < j.size(); ++i) {
        const Vec r = json_vec(j[i], what);
        if (r.size() != n)
            throw std::invalid_argument(std::string("ragged rows in ") + what);
        m.row(static_cast<Eigen::Index>(i)) = r.transpose();
    }
    return m;
}

Json parse(const std::string& text)
{
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("invalid JSON: ") + e.what());
    }
}

const Json& field(const Json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key))
        throw std::invalid_argument(std::string("missing field: ") + key);
    return j.at(key);
}

Json spec_json(const UncertaintySpec& s)
{
    Json j;
    j["c_x"] = vec_json(s.c_x);
    j["G_x"] = mat_json(s.G_x);
    j["alpha_x"] = vec_json(s.alpha_x);
    j["cdelta_x"] = vec_json(s.cdelta_x);
    j["c_u"] = vec_json(s.c_u);
    j["G_u"] = mat_json(s.G_u);
    j["alpha_u"] = vec_json(s.alpha_u);
    j["cdelta_u"] = vec_json(s.cdelta_u);
    return j;
}

UncertaintySpec json_spec(const Json& j)
{
    UncertaintySpec s;
    s.c_x = json_vec(field(j, "c_x"), "c_x");
    s.alpha_x = json_vec(field(j, "alpha_x"), "alpha_x");
    s.G_x = json_mat(field(j, "G_x"), "G_x", s.alpha_x.size());
    s.cdelta_x = json_vec(field(j, "cdelta_x"), "cdelta_x");
    s.c_u = json_vec(field(j, "c_u"), "c_u");
    s.alpha_u = json_vec(field(j, "alpha_u"), "alpha_u");
    s.G_u = json_mat(field(j, "G_u"), "G_u", s.alpha_u.size());
    s.cdelta_u = json_vec(field(j, "cdelta_u"), "cdelta_u");
    s.validate();
    return s;
}

ConformanceStatus status_from(const std::string& s)
{
    for (auto st : {ConformanceStatus::Conformant, ConformanceStatus::Infeasible, ConformanceStatus::Failed})
        if (s == to_string(st))
            return st;
    throw std::invalid_argument("unknown status: " + s);
}

} // namespace

std::string zonotope_to_json(const Zonotope& z)
{
    Json j;
    j["center"] = vec_json(z.center());
    j["generators"] = mat_json(z.generators());
    return j.dump(2);
}

Zonotope zonotope_from_json(const std::string& text)
{
    const auto j = parse(text);
    Vec c = json_vec(field(j, "center"), "center");
    Mat G = json_mat(field(j, "generators"), "generators");
    if (G.rows() == 0)
        G.resize(c.size(), 0);
    return Zonotope(std::move(c), std::move(G));
}

std::string suite_to_json(const TestSuite& suite)
{
    Json cases = Json::array();
    for (const auto& c : suite.cases) {
        Json jc;
        if (c.nominal_x0.size() > 0)
            jc["x0"] = vec_json(c.nominal_x0);
        jc["u"] = mat_json(c.nominal_u);
        Json samples = Json::array();
        for (const auto& s : c.samples)
            samples.push_back(mat_json(s));
        jc["samples"] = std::move(samples);
        cases.push_back(std::move(jc));
    }
    Json j;
    j["cases"] = std::move(cases);
    return j.dump();
}

TestSuite suite_from_json(const std::string& text)
{
    const auto j = parse(text);
    const auto& cases = field(j, "cases");
    if (!cases.is_array())
        throw std::invalid_argument("cases must be an array");
    TestSuite suite;
    for (const auto& jc : cases) {
        TestCase c;
        if (jc.contains("x0"))
            c.nominal_x0 = json_vec(jc.at("x0"), "x0");
        c.nominal_u = json_mat(field(jc, "u"), "u");
        for (const auto& s : field(jc, "samples"))
            c.samples.push_back(json_mat(s, "samples"));
        if (c.samples.empty())
            throw std::invalid_argument("test case without samples");
        if (c.nominal_u.cols() == 0)
            c.nominal_u.resize(0, c.samples.front().cols());
        suite.cases.push_back(std::move(c));
    }
    if (!suite.cases.empty())
        suite.validate(static_cast<int>(suite.cases.front().samples.front().rows()));
    return suite;
}

std::string spec_to_json(const UncertaintySpec& spec) { return spec_json(spec).dump(2); }

UncertaintySpec spec_from_json(const std::string& text) { return json_spec(parse(text)); }

std::string model_to_json(const IdentifiedModel& m)
{
    const auto& r = m.result;
    Json j;
    j["system"] = m.system;
    j["method"] = m.method;
    if (m.p)
        j["p"] = vec_json(*m.p);
    if (!m.narx.empty())
        j["narx"] = m.narx;
    j["status"] = to_string(r.status);
    j["cost"] = std::isfinite(r.cost) ? Json(r.cost) : Json(nullptr);
    j["alpha"] = vec_json(r.alpha);
    j["cdelta"] = vec_json(r.cdelta);
    j["additive"] = r.additive;
    j["containment_rate"] = r.containment_rate;
    j["sets"] = spec_json(r.spec);
    return j.dump(2);
}

IdentifiedModel model_from_json(const std::string& text)
{
    const auto j = parse(text);
    IdentifiedModel m;
    m.system = field(j, "system").get<std::string>();
    m.method = field(j, "method").get<std::string>();
    if (j.contains("p"))
        m.p = json_vec(j.at("p"), "p");
    if (j.contains("narx"))
        m.narx = j.at("narx").get<std::string>();
    auto& r = m.result;
    r.status = status_from(field(j, "status").get<std::string>());
    const auto& cost = field(j, "cost");
    r.cost = cost.is_null() ? std::numeric_limits<double>::infinity() : cost.get<double>();
    r.alpha = json_vec(field(j, "alpha"), "alpha");
    r.cdelta = json_vec(field(j, "cdelta"), "cdelta");
    r.additive = j.value("additive", false);
    r.containment_rate = j.value("containment_rate", -1.0);
    r.spec = json_spec(field(j, "sets"));
    return m;
}

Model instantiate(const IdentifiedModel& m)
{
    if (!m.narx.empty()) {
        const auto parsed = gp::parse_sexpr(m.narx);
        return gp::to_narx(parsed.ind, parsed.np, parsed.ny, parsed.nu);
    }
    const auto base = catalog_model(m.system);
    return m.p ? with_params(base, *m.p) : base;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << text;
    if (!text.empty() && text.back() != '\n')
        out << '\n';
}

} // namespace reachconf::io
