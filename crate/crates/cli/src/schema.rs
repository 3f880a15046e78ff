pub const SCHEMA: &str = r#"homsym scenario file (TOML)

Complex numbers are written as [re, im]. Occupation vectors list one count per
mode in spatial-major order: index = spatial * internal_count + internal.

task = "symmetry" | "detect" | "fisher" | "verify"     optional; must match the subcommand

[layout]
spatial  = <int >= 2>                                    required
internal = <int >= 1>                                    default 1

[state]                                                  exactly one of builder, terms, mixture
builder  = "hom-biphoton"            one photon in each of 2 spatial modes, same internal mode
         | "antisymmetric-biphoton"  (|a,b> - |b,a>)/sqrt2 over internal modes `pair`, 2 spatial modes
         | "one-photon-per-mode"     one photon in every spatial mode, same internal mode
         | "pre-dft-symmetrized"     DFT applied to `terms` (or to one-photon-per-mode)
internal = <int>                                         internal mode for single-label builders, default 0
pair     = [<int>, <int>]                                default [0, 1]
terms    = [{ amp = [re, im], counts = [<int>, ...] }, ...]
normalize = <bool>                                       default true
mixture  = [{ weight = <float>, builder/internal/pair/terms/normalize as above }, ...]

[interferometer]                                         optional, default builder = "dft"
builder  = "identity" | "dft" | "hadamard" | "cyclic-shift" | "phase"
         | "bs"              theta, phi, tau (default 0)
         | "permutation"     sigma = [images of 0..n-1]
         | "block-dft"       sigma = [images of 0..n-1]
matrix   = [[[re, im], ...], ...]                        n x n (lifted over internal modes) or nd x nd

[generator]                                              required by fisher
builder  = "mode-phase"          weights = [n or nd floats]
         | "collective-delay"    frequencies = [d floats]
         | "alternating-delay"   frequencies = [d floats]
         | "spatial-number"      mode = <int>
matrix   = [[[re, im], ...], ...]                        nd x nd Hermitian

[params]                                                 command-line flags take precedence
residue   = <int in 0..n>        default 0; hit event sum_k k m_k = -residue (mod n)
kappa_max = <float > 0>          default 0.5; sweep grid kappa_i = i * kappa_max / points, i = 1..points
points    = <int >= 1>           default 25
samples   = <int>                default 0; seeded draws from the detect distribution
seed      = <u64>                default 2024
cases     = <int>                default 100; random cases per verify check

Outputs in --out DIR: <task>.json (sorted keys), <task>.txt, and CSV files
(symmetry.csv; distribution.csv, residues.csv, samples.csv; fisher.csv; verify.csv).

Exit status: 0 success, 1 I/O error, 2 invalid command line or config,
3 violated precondition, 4 verify failure.
"#;
