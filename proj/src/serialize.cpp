#include "mnl/serialize.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "mnl/errors.hpp"
#include "mnl/report.hpp"
#include "mnl/unit.hpp"

namespace mnl {

namespace {

[[noreturn]] void bad(const std::string& what) { throw DataError(DataErrorKind::bad_format, "agent file: " + what); }

std::string next_token(std::istream& in, const char* what) {
    std::string tok;
    if (!(in >> tok)) {
        bad(std::string("unexpected end of input, expected ") + what);
    }
    return tok;
}

void expect(std::istream& in, std::string_view keyword) {
    const std::string tok = next_token(in, std::string(keyword).c_str());
    if (tok != keyword) {
        bad("expected '" + std::string(keyword) + "', found '" + tok + "'");
    }
}

template <class T>
T parse_number(const std::string& tok, const char* what) {
    T value{};
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
        bad(std::string("cannot parse ") + what + " from '" + tok + "'");
    }
    return value;
}

}  // namespace

void write_unit(std::ostream& out, std::string_view role, const Unit& unit) {
    out << "unit " << role << ' ' << to_string(unit.arch()) << ' ' << unit.hidden() << ' '
        << to_string(unit.head.activation) << '\n';
    const ParamLayout layout = layout_of(unit);
    const Vec64 flat = flatten(unit);
    for (const auto& block : layout.blocks) {
        out << block.name << ' ' << block.size;
        for (std::size_t k = 0; k < block.size; ++k) {
            out << ' ' << format_real(flat[block.offset + k]);
        }
        out << '\n';
    }
    out << "end\n";
}

Unit read_unit(std::istream& in, std::string_view expected_role) {
    expect(in, "unit");
    const std::string role = next_token(in, "unit role");
    if (role != expected_role) {
        bad("expected unit '" + std::string(expected_role) + "', found '" + role + "'");
    }
    Arch arch{};
    Activation act{};
    try {
        arch = parse_arch(next_token(in, "architecture"));
        const auto hidden = parse_number<std::size_t>(next_token(in, "hidden width"), "hidden width");
        act = parse_activation(next_token(in, "head activation"));
        if (hidden == 0) {
            bad("hidden width must be >= 1");
        }
        Unit unit = make_zero_unit(arch, hidden, act);
        const ParamLayout layout = layout_of(unit);
        Vec64 flat(layout.total);
        for (const auto& block : layout.blocks) {
            const std::string name = next_token(in, "block name");
            if (name != block.name) {
                bad("expected block '" + block.name + "', found '" + name + "'");
            }
            const auto count = parse_number<std::size_t>(next_token(in, "block size"), "block size");
            if (count != block.size) {
                bad("block '" + block.name + "' has " + std::to_string(count) + " values, expected " +
                    std::to_string(block.size));
            }
            for (std::size_t k = 0; k < count; ++k) {
                flat[block.offset + k] = parse_number<double>(next_token(in, "value"), "value");
            }
        }
        expect(in, "end");
        if (!all_finite(flat)) {
            bad("non-finite parameter in unit '" + role + "'");
        }
        assign_flat(unit, flat);
        return unit;
    } catch (const ParameterError& e) {
        bad(e.what());
    }
}

std::string serialize_agent(const Agent& agent) {
    std::ostringstream out;
    out << "mnl-agent " << kAgentFormatVersion << '\n';
    out << "arch " << to_string(agent.arch) << '\n';
    out << "window " << agent.window << '\n';
    out << "hidden " << agent.mpu.hidden() << '\n';
    out << "seed " << agent.provenance.seed << '\n';
    out << "config_digest " << (agent.provenance.config_digest.empty() ? "-" : agent.provenance.config_digest)
        << '\n';
    write_unit(out, "mpu", agent.mpu);
    write_unit(out, "dpu", agent.dpu);
    return out.str();
}

Agent deserialize_agent(std::string_view text) {
    std::istringstream in{std::string(text)};
    expect(in, "mnl-agent");
    const int version = parse_number<int>(next_token(in, "format version"), "format version");
    if (version != kAgentFormatVersion) {
        bad("unsupported format version " + std::to_string(version));
    }
    Agent agent;
    expect(in, "arch");
    try {
        agent.arch = parse_arch(next_token(in, "architecture"));
    } catch (const ParameterError& e) {
        bad(e.what());
    }
    expect(in, "window");
    agent.window = parse_number<std::size_t>(next_token(in, "window"), "window");
    expect(in, "hidden");
    const auto hidden = parse_number<std::size_t>(next_token(in, "hidden width"), "hidden width");
    expect(in, "seed");
    agent.provenance.seed = parse_number<std::uint64_t>(next_token(in, "seed"), "seed");
    expect(in, "config_digest");
    agent.provenance.config_digest = next_token(in, "config digest");
    if (agent.provenance.config_digest == "-") {
        agent.provenance.config_digest.clear();
    }
    agent.mpu = read_unit(in, "mpu");
    agent.dpu = read_unit(in, "dpu");
    std::string trailing;
    if (in >> trailing) {
        bad("unexpected trailing content '" + trailing + "'");
    }
    if (agent.mpu.hidden() != hidden || agent.dpu.hidden() != hidden) {
        bad("unit widths disagree with the declared hidden width");
    }
    try {
        agent.validate();
    } catch (const CompatibilityError& e) {
        bad(e.what());
    }
    return agent;
}

void save_agent(const std::filesystem::path& path, const Agent& agent) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError(DataErrorKind::missing_file, "cannot write '" + path.string() + "'");
    }
    out << serialize_agent(agent);
}

Agent load_agent(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError(DataErrorKind::missing_file, "cannot open '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize_agent(buf.str());
}

}  // namespace mnl
