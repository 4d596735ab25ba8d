#include <iostream>
#include <string>
#include <vector>

#include "cattice/cli.hpp"

namespace {

const char* kUsage = R"(cattice <command> [flags]

commands:
  validate           check every block of a spec against the axioms
  yoneda-check       canonical-map bijection checks for presheaves
  limit              limit of a Set diagram (--presheaf) or of a diagram
                     into a category (--diagram, --direction)
  colimit            colimit of a Set diagram (--presheaf)
  exchange-check     hom(colim, A) vs lim hom checks on a presheaf diagram
  p1p2-check         hom(T, lim) vs lim hom (the whole-vs-factored check)
  eval-awareness     sample or exhaustively evaluate a task set on a world
  train-awareness    gradient training of a self object against a task set
  scenario-solve     whole and factored task scores over a scenario
  model-solve        abstract a weighted diagram and solve it exactly
  scope-measure      breadth and depth of a scope
  consistency-check  evaluate a consistency suite
  consistency-train  train a world against a consistency suite
  save               materialize a world from a spec into a checkpoint
  load               inspect (and optionally re-save) a checkpoint

flags:
  --spec <path>      input spec file (checkpoint path for `load`)
  --seed <u64>       PRNG seed; required by the sampling/training commands
  --steps <n>        sample count or training iterations
  --lr <real>        learning rate (default 0.5 awareness, 0.3 consistency)
  --out <path>       checkpoint output path
  --report <path>    write a machine-readable key=value report
  --exhaustive       exact sweep instead of sampling (eval-awareness)
  --category/--object/--presheaf/--diagram/--world/--tasks/
  --scenario/--scope/--abstract/--suite/--self/--direction
                     block selectors; optional when the spec has exactly one
                     block of the needed kind

environment:
  CATTICE_PRECISION  decimal places in reports (default 6)
)";

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty() || args[0] == "--help" || args[0] == "-h" || args[0] == "help") {
        std::cout << kUsage;
        return args.empty() ? cattice::cli::kUsage : cattice::cli::kOk;
    }
    return cattice::cli::run(args, std::cout, std::cerr);
}
