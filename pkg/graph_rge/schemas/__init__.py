from .embedding import EmbeddingMatrix, NodeEmbeddings, RandomGraph, SamplerConfig, Scheme
from .graph import Dataset, Graph
from .learn import CvReport, Hyperparams, LinearModel
from .run import RunConfig
from .transport import TransportPlan, TransportProblem
