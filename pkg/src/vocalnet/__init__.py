"""vocalnet: identify animal species and breeds from vocalization recordings.

Pipeline: WAV parsing -> 28 spectral properties per clip -> sigmoid MLPs
trained by back-propagation under 10-fold cross-validation -> MDL-guided
forward feature selection -> confusion-matrix evaluation.
"""

from .audio_io import AudioClip, Frame, frame_clip, parse_wav, read_wav, resample, save_wav, write_wav
from .dataset import (FoldPlan, LabeledCorpus, LabeledSample, SplitPlan,
                      load_corpus, plan_folds, plan_split,
                      read_feature_cache, write_feature_cache)
from .evaluation import (ConfusionMatrix, EvalReport, confusion_matrix,
                         cross_fold_report, feature_summary, summarize)
from .features import (FEATURE_NAMES, FeatureVector, extract_features)
from .mlp import (Network, NetworkSpec, TrainingConfig, TrainingState,
                  classify, forward, init_network, load_model, save_model, train)
from .pipeline import train_all_folds
from .selection import SelectionTrace, forward_select, mdl_score

__version__ = "0.1.0"
