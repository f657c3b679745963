import json
import math

from wtforms import Field, FloatField, Form, IntegerField, StringField
from wtforms.validators import AnyOf, NumberRange, StopValidation, ValidationError

from smoothcal.constants import DEFAULT_K_CAP, MAX_TOEPLITZ_N
from smoothcal.errors import ConfigError, DomainError, InvalidDensityError
from smoothcal.fourier_core import coefficients_from_rho_model
from smoothcal.models import CoefficientModel, ExperimentConfig, NoiseSpec, Problem, QuasiExp, QuasiPower
from smoothcal.simulators import validate_density

PROBLEM_NAMES = ['regression', 'density', 'spectral', 'A', 'B', 'C']
MODEL_TYPES = ['coefficients', 'quasi-power', 'quasi-exp']
SIGN_PATTERNS = ['positive', 'alternating']
FAMILIES = ['quasi-power', 'quasi-exp']
CI_METHODS = ['plug-in', 'quadratic-solve']
NOISE_KINDS = ['gaussian', 'rademacher', 'uniform']


# --- Custom Validators ---
def required(form, field):
    """Like DataRequired, but 0 is a valid value."""
    if field.data is None or field.data == '' or field.data == ():
        raise StopValidation('This field is required.')


def optional(form, field):
    if field.data is None or field.data == '':
        raise StopValidation()


def finite(form, field):
    if field.data is not None and not math.isfinite(field.data):
        raise ValidationError('Must be a finite number.')


class FloatListField(Field):
    """A list of floats given as a JSON array or a comma separated string."""

    def process_data(self, value):
        if value is None:
            self.data = None
            return
        if isinstance(value, str):
            value = [item for item in value.split(',') if item.strip()]
        try:
            self.data = tuple(float(item) for item in value)
        except (TypeError, ValueError) as exc:
            self.data = None
            raise ValueError('Not a valid list of numbers.') from exc


# --- Forms ---

class ExperimentConfigForm(Form):
    """Validates a flattened experiment configuration document."""
    problem = StringField('Problem', validators=[required, AnyOf(PROBLEM_NAMES)])
    n = IntegerField('Sample size', validators=[required, NumberRange(min=4)])
    K = IntegerField('Coefficients computed', validators=[optional, NumberRange(min=2)])
    replications = IntegerField('Replications', default=1, validators=[required, NumberRange(min=1)])
    seed = IntegerField('Seed', default=0, validators=[required, NumberRange(min=0)])
    alpha = FloatField('Level', default=0.95, validators=[required])
    N_range = FloatListField('N range', validators=[optional])
    family = StringField('Fit family', default='quasi-power', validators=[required, AnyOf(FAMILIES)])
    ci_method = StringField('Interval method', default='plug-in', validators=[required, AnyOf(CI_METHODS)])
    output = StringField('Output directory', default='results', validators=[required])

    model_type = StringField('Model type', validators=[required, AnyOf(MODEL_TYPES)])
    model_coeffs = FloatListField('Coefficients', validators=[optional])
    model_c1 = FloatField('c1', validators=[optional, finite])
    model_alpha = FloatField('alpha', validators=[optional, finite])
    model_gamma = FloatField('gamma', default=0.0, validators=[optional, finite])
    model_c2 = FloatField('c2', validators=[optional, finite])
    model_kappa = FloatField('kappa', default=0.0, validators=[optional, finite])
    model_q = FloatField('q', validators=[optional, finite])
    model_K = IntegerField('Model coefficients', validators=[optional, NumberRange(min=1)])
    model_head = FloatField('Constant coefficient', default=1.0, validators=[required, finite])
    model_signs = StringField('Sign pattern', default='positive', validators=[required, AnyOf(SIGN_PATTERNS)])

    noise_kind = StringField('Noise kind', default='gaussian', validators=[required, AnyOf(NOISE_KINDS)])
    noise_scale = FloatField('Noise scale', default=1.0, validators=[required, NumberRange(min=0.0), finite])

    t_grid = FloatListField('Tail grid', default=(0.5, 1.0, 1.5, 2.0, 2.5, 3.0), validators=[required])
    tail_N = IntegerField('Tail check N', default=8, validators=[required, NumberRange(min=1)])

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._model = None

    @property
    def problem_tag(self):
        return Problem.from_name(self.problem.data)

    @property
    def coefficient_limit(self):
        """Largest admissible K: n, or n - 1 for the spectral problem."""
        if self.n.data is None:
            return None
        return self.n.data - 1 if self.problem.data in ('spectral', 'C') else self.n.data

    @property
    def effective_K(self):
        """K from the document, else min(limit, DEFAULT_K_CAP)."""
        if self.K.data is not None:
            return self.K.data
        limit = self.coefficient_limit
        return None if limit is None else min(limit, DEFAULT_K_CAP)

    def validate_n(self, n):
        if self.problem.data in ('spectral', 'C') and n.data is not None and n.data > MAX_TOEPLITZ_N:
            raise ValidationError(f'Stationary sequences are limited to n <= {MAX_TOEPLITZ_N}.')

    def validate_K(self, K):
        limit = self.coefficient_limit
        if K.data is not None and limit is not None and K.data > limit:
            raise ValidationError(f'K must not exceed {limit}.')

    def validate_alpha(self, alpha):
        if alpha.data is None or not 0.0 < alpha.data < 1.0:
            raise ValidationError('Level must lie strictly between 0 and 1.')

    def validate_N_range(self, N_range):
        if N_range.data is None:
            return
        if len(N_range.data) != 2 or any(v != int(v) for v in N_range.data):
            raise ValidationError('N range must be two integers [a, b].')
        a, b = (int(v) for v in N_range.data)
        K = self.effective_K
        if K is None:
            return
        if a < 1 or a > b or b > K // 2:
            raise ValidationError(f'N range must satisfy 1 <= a <= b <= floor(K/2) = {K // 2}.')

    def validate_t_grid(self, t_grid):
        values = t_grid.data or ()
        if any(not (t > 0 and math.isfinite(t)) for t in values):
            raise ValidationError('Tail grid values must be positive.')
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValidationError('Tail grid must be strictly increasing.')

    def validate_tail_N(self, tail_N):
        K = self.effective_K
        if K is not None and tail_N.data is not None and 2 * tail_N.data > K:
            raise ValidationError(f'Tail check N must satisfy 2N <= K = {K}.')

    def validate_model_type(self, model_type):
        try:
            self._model = self._build_model()
        except InvalidDensityError as e:
            raise ValidationError(f'Not a valid density: {e}')
        except (DomainError, TypeError) as e:
            raise ValidationError(str(e))

    def _build_model(self):
        kind = self.model_type.data
        if kind == 'coefficients':
            if not self.model_coeffs.data:
                raise DomainError('coefficient models need a non-empty coefficient list')
            model = CoefficientModel(self.model_coeffs.data)
        else:
            if kind == 'quasi-power':
                if self.model_c1.data is None or self.model_alpha.data is None:
                    raise DomainError('quasi-power models need c1 and alpha')
                rho_model = QuasiPower(self.model_c1.data, self.model_alpha.data, self.model_gamma.data or 0.0)
            else:
                if self.model_c2.data is None or self.model_q.data is None:
                    raise DomainError('quasi-exp models need c2 and q')
                rho_model = QuasiExp(self.model_c2.data, self.model_kappa.data or 0.0, self.model_q.data)
            K_model = self.model_K.data or max(self.effective_K or 2, 2)
            model = coefficients_from_rho_model(rho_model, K_model, head=self.model_head.data,
                                                signs=self.model_signs.data)
        if self.problem.data in ('density', 'B'):
            validate_density(model)
        return model

    def to_config(self):
        """The validated ExperimentConfig; call after validate()."""
        K = self.effective_K
        if self.N_range.data is not None:
            N_range = tuple(int(v) for v in self.N_range.data)
        else:
            N_range = (1, K // 2)
        return ExperimentConfig(
            problem=self.problem_tag,
            model=self._model,
            n=self.n.data,
            K=K,
            N_range=N_range,
            replications=self.replications.data,
            seed=self.seed.data,
            alpha=self.alpha.data,
            family=self.family.data,
            noise=NoiseSpec(self.noise_kind.data, self.noise_scale.data),
            ci_method=self.ci_method.data,
            output=self.output.data,
            t_grid=tuple(self.t_grid.data),
            tail_N=self.tail_N.data,
        )


def flatten_config(document):
    """Map the nested JSON document onto ExperimentConfigForm field names."""
    if not isinstance(document, dict):
        raise ConfigError('configuration must be a JSON object')
    flat = {key: value for key, value in document.items() if key not in ('model', 'noise', 'tailcheck')}
    for section, prefix in (('model', 'model_'), ('noise', 'noise_')):
        sub = document.get(section) or {}
        if not isinstance(sub, dict):
            raise ConfigError(f"'{section}' must be a JSON object")
        for key, value in sub.items():
            flat[prefix + key] = value
    tail = document.get('tailcheck') or {}
    if not isinstance(tail, dict):
        raise ConfigError("'tailcheck' must be a JSON object")
    if 't_grid' in tail:
        flat['t_grid'] = tail['t_grid']
    if 'N' in tail:
        flat['tail_N'] = tail['N']
    return flat


def parse_config(document, overrides=None):
    """Validate a config document (dict or JSON text) and return an ExperimentConfig."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as e:
            raise ConfigError(f'configuration is not valid JSON: {e}') from e
    flat = flatten_config(document)
    flat.update({key: value for key, value in (overrides or {}).items() if value is not None})
    form = ExperimentConfigForm(data=flat)
    unknown = sorted(set(flat) - set(form._fields))
    if unknown:
        raise ConfigError('unknown configuration keys', {key: ['Unknown key.'] for key in unknown})
    if not form.validate():
        raise ConfigError('invalid experiment configuration', form.errors)
    return form.to_config()
