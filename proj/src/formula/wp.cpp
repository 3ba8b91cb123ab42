#include "miniver/formula/wp.hpp"

namespace miniver {

Formula weakest_precondition(const Formula& f, const CfaEdge& e, AssumeCombinator combine,
                             int& fresh_counter) {
    switch (e.op) {
        case CfaEdge::Op::Assign: return f.substituted(e.var, e.expr);
        case CfaEdge::Op::Havoc: {
            std::string fresh = e.var + "!w" + std::to_string(++fresh_counter);
            return f.renamed({{e.var, fresh}});
        }
        case CfaEdge::Op::Assume:
            return combine == AssumeCombinator::Implication ? Formula::implication(e.cond, f)
                                                            : Formula::conjunction({e.cond, f});
        case CfaEdge::Op::Call:
        case CfaEdge::Op::Return:
        case CfaEdge::Op::Skip: return f;
    }
    return f;
}

}  // namespace miniver
