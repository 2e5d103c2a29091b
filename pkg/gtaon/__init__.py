"""Global imports for gtaon's API."""
from gtaon.bitmatrix import BitMatrix

from gtaon.design import (PopulationParams, BernoulliParams, DefectiveSet,
                          Outcomes, DesignKind, DesignSpec, GeneratedDesign,
                          solve_nu, sample_defective_set, gen_bernoulli,
                          gen_column_zeroed, gen_all_or_none, apply_model,
                          sample_null)

from gtaon.decode import (Estimate, RecoveryReport, decode_comp,
                          decode_rank_overlap, decode_ml_exhaustive,
                          decode_reduced, score, predict_extra_test)

from gtaon.detect import (Hypothesis, DetectVerdict, detect_trivial,
                          covered_count, detect_covered)

from gtaon.divergence import (DivergenceReport, chi2_exact,
                              pair_consistency_prob, chi2_lemma3_bound,
                              chi2_lower_terms, berry_esseen_binomial_tail)

from gtaon.enumeration import chi2_enumerated, bayes_error_oracle

from gtaon.dd import (SaffronBlock, DdResult, Witness, build_saffron,
                      decode_saffron, dd_negative_witness)

from gtaon.exceptions import *
