#include "cryptsim/nrbn/network_io.hpp"

#include "cryptsim/error.hpp"
#include "cryptsim/util/format.hpp"

#include <fstream>
#include <sstream>

namespace cryptsim::nrbn {

void write_network(std::ostream& out, const BooleanNetwork& net)
{
    for (std::size_t i = 0; i < net.node_count(); ++i) {
        out << "node " << i << ": inputs=";
        const auto& in = net.inputs(i);
        for (std::size_t m = 0; m < in.size(); ++m)
            out << (m ? "," : "") << in[m];
        out << " table=";
        for (bool b : net.truth_table(i))
            out << (b ? '1' : '0');
        out << " clamp=";
        if (const auto c = net.clamp(i))
            out << (*c ? '1' : '0');
        else
            out << "none";
        out << '\n';
    }
}

std::string format_network(const BooleanNetwork& net)
{
    std::ostringstream out;
    write_network(out, net);
    return out.str();
}

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what)
{
    throw Error(ErrorCode::Config, "network line " + std::to_string(line) + ": " + what);
}

std::string field(const std::string& token, const std::string& key, std::size_t line)
{
    if (token.rfind(key + "=", 0) != 0)
        fail(line, "expected '" + key + "=...', got '" + token + "'");
    return token.substr(key.size() + 1);
}

}  // namespace

BooleanNetwork parse_network(std::istream& in)
{
    std::vector<std::vector<NodeIndex>> inputs;
    std::vector<std::vector<bool>> tables;
    std::vector<std::optional<bool>> clamps;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string text = util::trim(raw.substr(0, raw.find('#')));
        if (text.empty())
            continue;
        std::istringstream tokens(text);
        std::string word, index, in_tok, table_tok, clamp_tok, extra;
        tokens >> word >> index >> in_tok >> table_tok >> clamp_tok;
        if (word != "node" || clamp_tok.empty() || (tokens >> extra))
            fail(line, "expected 'node <i>: inputs=... table=... clamp=...'");
        if (index.empty() || index.back() != ':')
            fail(line, "missing ':' after node index");
        if (index.substr(0, index.size() - 1) != std::to_string(inputs.size()))
            fail(line, "nodes must be listed in order; expected node " + std::to_string(inputs.size()));

        std::vector<NodeIndex> wiring;
        const std::string in_list = field(in_tok, "inputs", line);
        if (!in_list.empty()) {
            for (const auto& part : util::split(in_list, ',')) {
                try {
                    std::size_t used = 0;
                    const unsigned long v = std::stoul(part, &used);
                    if (used != part.size())
                        throw std::invalid_argument(part);
                    wiring.push_back(static_cast<NodeIndex>(v));
                } catch (const std::exception&) {
                    fail(line, "bad input index '" + part + "'");
                }
            }
        }
        std::vector<bool> table;
        for (char c : field(table_tok, "table", line)) {
            if (c != '0' && c != '1')
                fail(line, "truth table must be a bitstring");
            table.push_back(c == '1');
        }
        const std::string clamp = field(clamp_tok, "clamp", line);
        if (clamp == "none")
            clamps.emplace_back(std::nullopt);
        else if (clamp == "0" || clamp == "1")
            clamps.emplace_back(clamp == "1");
        else
            fail(line, "clamp must be 0, 1 or none");
        inputs.push_back(std::move(wiring));
        tables.push_back(std::move(table));
    }
    try {
        return BooleanNetwork(std::move(inputs), std::move(tables), std::move(clamps));
    } catch (const Error& e) {
        throw Error(ErrorCode::Config, std::string("network: ") + e.what());
    }
}

BooleanNetwork parse_network(const std::string& text)
{
    std::istringstream in(text);
    return parse_network(in);
}

BooleanNetwork load_network(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::Io, "cannot open network file " + path);
    return parse_network(in);
}

void write_attractors(std::ostream& out, const AttractorSet& set)
{
    for (const auto& a : set.attractors) {
        out << a.name() << " period=" << a.period() << " states=";
        for (std::size_t t = 0; t < a.cycle.size(); ++t)
            out << (t ? "|" : "") << a.cycle[t].to_string();
        out << '\n';
    }
    if (!set.exhaustive)
        out << "# sampled enumeration: set may be incomplete\n";
}

}  // namespace cryptsim::nrbn
