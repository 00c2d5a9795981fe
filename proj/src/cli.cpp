#include "ainf/cli.hpp"

#include "ainf/formality.hpp"
#include "ainf/format.hpp"
#include "ainf/mc.hpp"
#include "ainf/perturbation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <sstream>

namespace ainf {

namespace {

using Json = nlohmann::ordered_json;

std::string fnv1a_digest(const std::string& data)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void render_text(const Json& node, const std::string& prefix, std::string& out)
{
    if (node.is_object()) {
        for (const auto& [key, value] : node.items()) {
            if (value.is_object() || value.is_array()) {
                out += prefix + key + ":\n";
                render_text(value, prefix + "  ", out);
            } else {
                out += prefix + key + ": " +
                       (value.is_string() ? value.get<std::string>() : value.dump()) + "\n";
            }
        }
    } else if (node.is_array()) {
        for (const auto& value : node) {
            if (value.is_object() || value.is_array()) {
                out += prefix + "-\n";
                render_text(value, prefix + "  ", out);
            } else {
                out += prefix + "- " +
                       (value.is_string() ? value.get<std::string>() : value.dump()) + "\n";
            }
        }
    } else {
        out += prefix + (node.is_string() ? node.get<std::string>() : node.dump()) + "\n";
    }
}

struct ReportSink {
    Json report;
    std::string format = "text";
    std::string out_path;
    std::string emitted; /* primary emitted structure, if any */

    std::string finish() const
    {
        if (!out_path.empty() && !emitted.empty()) {
            std::ofstream f(out_path, std::ios::binary);
            f << emitted;
        }
        if (format == "structured")
            return report.dump(2) + "\n";
        std::string text;
        render_text(report, "", text);
        return text;
    }
};

std::string slot_str(const SlotKey& slot)
{
    return "(" + std::to_string(slot.arity) + ", " + slot.energy.str() + ")";
}

std::string tuple_str(const AlgebraFile& file, TupleKey key)
{
    std::string s = "(";
    auto idx = unpack_tuple(key);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (i)
            s += ", ";
        s += file.algebra ? file.algebra->mono_name(idx[i])
                          : file.space().names[static_cast<std::size_t>(idx[i])];
    }
    return s + ")";
}

Json witness_json(const AlgebraFile& file, const SlotWitness& w)
{
    Json j;
    j["slot"] = slot_str(w.slot);
    j["inputs"] = tuple_str(file, w.tuple);
    return j;
}

struct CommonOpts {
    std::string path;
    std::string trunc_energy;
    int trunc_arity = 0;
    std::string format = "text";
};

AlgebraFile load(const CommonOpts& opts, ReportSink& sink)
{
    std::string text = read_file(opts.path);
    AlgebraFile file = parse_algebra_file(text);
    if (!opts.trunc_energy.empty() || opts.trunc_arity > 0) {
        Energy e = opts.trunc_energy.empty() ? file.trunc.e_max
                                             : Rational::parse(opts.trunc_energy);
        int k = opts.trunc_arity > 0 ? opts.trunc_arity : file.trunc.k_max;
        file.trunc = TruncParams(e, k);
        file.structure.validate(file.trunc);
    }
    sink.report["inputs_digest"] = fnv1a_digest(text);
    return file;
}

int cmd_check(const CommonOpts& opts, bool self_dual, ReportSink& sink)
{
    AlgebraFile file = load(opts, sink);
    int status = 0;
    if (file.structure.role == Role::structure) {
        auto violations = check_ainf(file.structure, file.trunc);
        sink.report["relations"] = violations.empty() ? "pass" : "fail";
        if (!violations.empty()) {
            Json arr = Json::array();
            for (const auto& v : violations)
                arr.push_back(witness_json(file, v));
            sink.report["violations"] = arr;
            status = 1;
        }
    } else {
        sink.report["relations"] = "skipped (pre-homomorphism file)";
    }
    if (self_dual) {
        auto witness = check_self_dual(file.structure, file.involution_map());
        sink.report["self_dual"] = witness ? "fail" : "pass";
        if (witness) {
            sink.report["self_dual_witness"] = witness_json(file, *witness);
            status = 1;
        }
    }
    sink.report["verdict"] = status == 0 ? "pass" : "fail";
    return status;
}

int cmd_minmodel(const CommonOpts& opts, bool equivariant, ReportSink& sink)
{
    AlgebraFile file = load(opts, sink);
    std::optional<LinearMap> inv;
    if (equivariant)
        inv = file.involution_map();
    RetractionData r = derive_retraction(file.structure, inv ? &*inv : nullptr);

    Json ranks = Json::array();
    for (const auto& dr : r.ranks) {
        Json row;
        row["degree"] = dr.degree;
        row["kernel"] = dr.kernel;
        row["image"] = dr.image;
        row["cohomology"] = dr.cohomology;
        ranks.push_back(row);
    }
    sink.report["cohomology_ranks"] = ranks;

    MinimalModel model = build_minimal_model(file.structure, r, file.trunc);
    sink.report["weakly_minimal"] = "pass";
    sink.report["inclusion_homomorphism"] = "pass";
    sink.report["inclusion_quasi_iso"] = "pass";
    if (inv && r.induced_involution) {
        auto witness = check_self_dual(model.structure, *r.induced_involution);
        sink.report["self_dual"] = witness ? "fail" : "pass";
        if (witness)
            return 1;
    }

    AlgebraFile emitted;
    emitted.plain_space = model.reduced;
    emitted.structure = model.structure;
    emitted.trunc = file.trunc;
    emitted.involution = InvolutionKind::identity;
    sink.emitted = emit_algebra_file(emitted);
    sink.report["minimal_model"] = sink.emitted;
    sink.report["verdict"] = "pass";
    return 0;
}

int cmd_formality(const CommonOpts& opts, bool no_symmetrize, ReportSink& sink)
{
    AlgebraFile file = load(opts, sink);
    if (!file.algebra)
        throw std::invalid_argument("formality needs a free algebra context");
    LinearMap parity = file.algebra->parity_involution();

    FormalityResult result =
        formality_run(file.structure, *file.algebra, parity, file.trunc, !no_symmetrize);

    Json log = Json::array();
    for (const auto& it : result.log) {
        Json row;
        row["iteration"] = it.index;
        row["nu_before"] = it.level_before.str();
        Json killed = Json::array();
        for (const auto& s : it.killed)
            killed.push_back(slot_str(s));
        row["killed"] = killed;
        row["nu_after"] = it.level_after ? it.level_after->str() : "infinity";
        log.push_back(row);
    }
    sink.report["iterations"] = log;

    bool hom = !check_homomorphism(result.gauge, result.final_structure, file.structure,
                                   file.trunc);
    bool qiso = is_quasi_iso(result.gauge, result.final_structure, file.structure);
    sink.report["gauge_homomorphism"] = hom ? "pass" : "fail";
    sink.report["gauge_quasi_iso"] = qiso ? "pass" : "fail";

    AlgebraFile emitted = file;
    emitted.structure = result.final_structure;
    sink.emitted = emit_algebra_file(emitted);
    sink.report["final_structure"] = sink.emitted;

    AlgebraFile gauge_file = file;
    gauge_file.structure = result.gauge;
    sink.report["gauge"] = emit_algebra_file(gauge_file);

    bool pass = hom && qiso;
    sink.report["verdict"] = pass ? "pass" : "fail";
    return pass ? 0 : 1;
}

int cmd_scramble(const CommonOpts& opts, std::uint64_t seed, int entries, int max_arity,
                 ReportSink& sink)
{
    AlgebraFile file = load(opts, sink);
    if (!file.algebra)
        throw std::invalid_argument("scramble needs a free algebra context");
    ScrambleProfile profile;
    profile.entries = entries;
    profile.max_arity = max_arity;
    Scramble s = scramble(*file.algebra, seed, profile, file.trunc);

    AlgebraFile emitted = file;
    emitted.structure = s.structure;
    sink.emitted = emit_algebra_file(emitted);
    sink.report["seed"] = std::to_string(seed);
    sink.report["structure"] = sink.emitted;

    AlgebraFile diffeo_file = file;
    diffeo_file.structure = s.diffeo;
    sink.report["diffeo"] = emit_algebra_file(diffeo_file);
    sink.report["verdict"] = "pass";
    return 0;
}

int cmd_mc_eval(const CommonOpts& opts, const std::string& b_text, ReportSink& sink)
{
    AlgebraFile file = load(opts, sink);
    if (!file.algebra)
        throw std::invalid_argument("mc eval needs a free algebra context");
    NovVec b = parse_nov_element(*file.algebra, b_text);
    NovVec residual = mc_residual(file.structure, b, file.trunc);
    sink.report["b"] = emit_nov_element(*file.algebra, b);
    sink.report["residual"] = emit_nov_element(*file.algebra, residual);
    bool zero = novvec_is_zero(residual);
    sink.report["bounding"] = zero ? "yes" : "no";
    sink.report["verdict"] = zero ? "pass" : "fail";
    return zero ? 0 : 1;
}

int cmd_mc_gauge(const CommonOpts& opts, const std::string& b0_text,
                 const std::string& b1_text, const std::string& c_text, ReportSink& sink)
{
    AlgebraFile file = load(opts, sink);
    if (!file.algebra)
        throw std::invalid_argument("mc gauge needs a free algebra context");
    NovVec b0 = parse_nov_element(*file.algebra, b0_text);
    NovVec b1 = parse_nov_element(*file.algebra, b1_text);
    NovVec c = parse_nov_element(*file.algebra, c_text);
    bool ok = check_gauge(file.structure, b0, b1, c, file.trunc);
    sink.report["gauge_equivalent"] = ok ? "yes" : "no";
    sink.report["verdict"] = ok ? "pass" : "fail";
    return ok ? 0 : 1;
}

int cmd_mc_floer(const CommonOpts& opts, const std::string& b_text, ReportSink& sink)
{
    AlgebraFile file = load(opts, sink);
    if (!file.algebra)
        throw std::invalid_argument("mc floer needs a free algebra context");
    NovVec b = parse_nov_element(*file.algebra, b_text);
    FloerReport fr = floer_rank(file.structure, b, file.trunc);
    sink.report["differential_zero"] = fr.differential_zero ? "yes" : "no";
    Json rows = Json::array();
    for (const auto& row : fr.rows) {
        Json r;
        r["degree"] = row.degree;
        r["dim"] = row.dim;
        r["rank"] = row.rank_out;
        r["hf_rank"] = row.hf_rank;
        rows.push_back(r);
    }
    sink.report["ranks"] = rows;
    sink.report["precision"] = fr.precision.str();
    sink.report["verdict"] = "pass";
    return 0;
}

int cmd_hochschild(const std::string& sub, const CommonOpts& opts, ReportSink& sink)
{
    std::string text = read_file(opts.path);
    CochainFile file = parse_cochain_file(text);
    sink.report["inputs_digest"] = fnv1a_digest(text);

    if (sub == "check") {
        Cochain b = coboundary(file.cochain);
        bool closed = b.is_zero();
        auto witness = antisymmetry_witness(file.cochain);
        sink.report["closed"] = closed ? "yes" : "no";
        sink.report["anti_symmetric"] = witness ? "no" : "yes";
        sink.report["verdict"] = closed ? "pass" : "fail";
        return closed ? 0 : 1;
    }
    if (sub == "epsilon") {
        HKRValue value = hkr_evaluate(file.cochain);
        Json rows = Json::array();
        for (const auto& [key, v] : value.values) {
            Json r;
            std::string word;
            for (int g : unpack_tuple(key)) {
                if (!word.empty())
                    word += ".";
                word += file.algebra->gen_names()[static_cast<std::size_t>(g)];
            }
            r["word"] = word.empty() ? "1" : word;
            std::string val;
            for (std::size_t i = 0; i < v.terms().size(); ++i) {
                if (i)
                    val += " + ";
                val += v.terms()[i].second.str() + "*" +
                       file.algebra->mono_name(v.terms()[i].first);
            }
            r["value"] = val;
            rows.push_back(r);
        }
        sink.report["epsilon"] = rows;
        sink.report["zero"] = value.is_zero() ? "yes" : "no";
        sink.report["verdict"] = "pass";
        return 0;
    }
    /* primitive */
    auto eta = solve_primitive(file.cochain);
    if (!eta) {
        sink.report["primitive"] = "no solution";
        sink.report["verdict"] = "fail";
        return 1;
    }
    CochainFile out;
    out.algebra = file.algebra;
    out.trunc = file.trunc;
    out.cochain = *eta;
    sink.emitted = emit_cochain_file(out);
    sink.report["primitive"] = sink.emitted;
    sink.report["verdict"] = "pass";
    return 0;
}

} // namespace

int dispatch(const std::vector<std::string>& args, std::string& output)
{
    CLI::App app{"exact engine for gapped A-infinity algebras over a truncated Novikov field"};
    app.require_subcommand(1);

    CommonOpts common;
    ReportSink sink;
    bool flag_self_dual = false;
    bool flag_equivariant = false;
    bool flag_no_symmetrize = false;
    std::uint64_t seed = 0;
    int entries = 4;
    int max_arity = 3;
    std::string b_text, b0_text, b1_text, c_text = "0";

    auto add_common = [&](CLI::App* cmd, bool needs_file = true) {
        if (needs_file)
            cmd->add_option("file", common.path, "input file")->required();
        cmd->add_option("--trunc-energy", common.trunc_energy, "override window energy");
        cmd->add_option("--trunc-arity", common.trunc_arity, "override window arity");
        cmd->add_option("--format", common.format, "text|structured")
            ->check(CLI::IsMember({"text", "structured"}));
        cmd->add_option("--out", sink.out_path, "write the emitted structure to a file");
    };

    CLI::App* check = app.add_subcommand("check", "verify the structure relations");
    add_common(check);
    check->add_flag("--self-dual", flag_self_dual, "also verify self-duality");

    CLI::App* minmodel = app.add_subcommand("minmodel", "weakly minimal model");
    add_common(minmodel);
    minmodel->add_flag("--equivariant", flag_equivariant,
                       "build the retraction compatibly with the involution");

    CLI::App* formality = app.add_subcommand("formality", "formality tools");
    CLI::App* formality_run_cmd = formality->add_subcommand("run", "run the gauge iteration");
    add_common(formality_run_cmd);
    formality_run_cmd->add_flag("--no-symmetrize", flag_no_symmetrize,
                                "skip the self-dual symmetrization of primitives");

    CLI::App* scramble_cmd = app.add_subcommand("scramble", "seeded anti-symmetric instance");
    add_common(scramble_cmd);
    scramble_cmd->add_option("--seed", seed, "random seed")->required();
    scramble_cmd->add_option("--entries", entries, "number of random diffeo entries");
    scramble_cmd->add_option("--max-arity", max_arity, "largest diffeo entry arity");

    CLI::App* mc = app.add_subcommand("mc", "bounding cochain tools");
    CLI::App* mc_eval = mc->add_subcommand("eval", "curvature of a candidate");
    add_common(mc_eval);
    mc_eval->add_option("--b", b_text, "candidate element")->required();
    CLI::App* mc_gauge = mc->add_subcommand("gauge", "verify a gauge equivalence");
    add_common(mc_gauge);
    mc_gauge->add_option("--b0", b0_text, "first bounding cochain")->required();
    mc_gauge->add_option("--b1", b1_text, "second bounding cochain")->required();
    mc_gauge->add_option("--c", c_text, "gauge element");
    CLI::App* mc_floer = mc->add_subcommand("floer", "ranks of the deformed differential");
    add_common(mc_floer);
    mc_floer->add_option("--b", b_text, "bounding cochain")->required();

    CLI::App* hoch = app.add_subcommand("hochschild", "cochain tools");
    CLI::App* hoch_check = hoch->add_subcommand("check", "closedness and anti-symmetry");
    add_common(hoch_check);
    CLI::App* hoch_eps = hoch->add_subcommand("epsilon", "anti-symmetrized evaluation");
    add_common(hoch_eps);
    CLI::App* hoch_prim = hoch->add_subcommand("primitive", "solve for a primitive");
    add_common(hoch_prim);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        std::ostringstream ss;
        ss << (e.get_exit_code() == 0 ? app.help() : std::string("error: ") + e.what())
           << "\n";
        output = ss.str();
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    sink.format = common.format;
    int status = 2;
    try {
        if (check->parsed()) {
            sink.report["command"] = "check";
            status = cmd_check(common, flag_self_dual, sink);
        } else if (minmodel->parsed()) {
            sink.report["command"] = "minmodel";
            status = cmd_minmodel(common, flag_equivariant, sink);
        } else if (formality->parsed() && formality_run_cmd->parsed()) {
            sink.report["command"] = "formality run";
            status = cmd_formality(common, flag_no_symmetrize, sink);
        } else if (scramble_cmd->parsed()) {
            sink.report["command"] = "scramble";
            status = cmd_scramble(common, seed, entries, max_arity, sink);
        } else if (mc->parsed() && mc_eval->parsed()) {
            sink.report["command"] = "mc eval";
            status = cmd_mc_eval(common, b_text, sink);
        } else if (mc->parsed() && mc_gauge->parsed()) {
            sink.report["command"] = "mc gauge";
            status = cmd_mc_gauge(common, b0_text, b1_text, c_text, sink);
        } else if (mc->parsed() && mc_floer->parsed()) {
            sink.report["command"] = "mc floer";
            status = cmd_mc_floer(common, b_text, sink);
        } else if (hoch->parsed()) {
            std::string sub = hoch_check->parsed() ? "check"
                              : hoch_eps->parsed() ? "epsilon"
                                                   : "primitive";
            sink.report["command"] = "hochschild " + sub;
            status = cmd_hochschild(sub, common, sink);
        } else {
            output = "error: missing subcommand\n";
            return 2;
        }
    } catch (const FileParseError& e) {
        sink.report["error"] = e.what();
        sink.report["verdict"] = "input error";
        output = sink.finish();
        return 2;
    } catch (const std::invalid_argument& e) {
        sink.report["error"] = e.what();
        sink.report["verdict"] = "input error";
        output = sink.finish();
        return 2;
    } catch (const std::exception& e) {
        sink.report["error"] = e.what();
        sink.report["verdict"] = "fail";
        output = sink.finish();
        return 1;
    }
    output = sink.finish();
    return status;
}

} // namespace ainf
