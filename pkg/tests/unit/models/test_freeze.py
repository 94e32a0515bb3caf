import pytest
import torch
from torch import nn

from src.core.exceptions import BackboneError
from src.models.factory import apply_freeze, backbone_depth, build_model, trainable_parameter_report
from src.schemas.model import TINY_BACKBONE_ID, FreezeSpec, ModelConfig

TEXTS = ["tu pagal hai yaar", "aaj mausam accha hai", "kya bakwas nonsense hai", "chal chai peete hai"]
LABELS = torch.tensor([1, 0, 1, 0])


def train_steps(model, steps: int = 3) -> None:
    optimizer = torch.optim.AdamW(
        [parameter for parameter in model.parameters() if parameter.requires_grad], lr=1e-2, weight_decay=0.01
    )
    criterion = nn.CrossEntropyLoss()
    model.train()
    for _ in range(steps):
        input_ids, attention_mask, _ = model.tokenize_batch(TEXTS)
        loss = criterion(model(input_ids, attention_mask), LABELS)
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()


@pytest.mark.parametrize(
    "spec",
    [FreezeSpec.none(), FreezeSpec.headline(), FreezeSpec.ablation_best(), FreezeSpec.all(2)],
    ids=["none", "emb+1", "emb+1-2", "all"],
)
def test_frozen_tensors_unchanged_after_training(tiny_model_config: ModelConfig, spec: FreezeSpec):
    """После трех шагов замороженные тензоры побитово равны исходным, голова обучается."""
    model = build_model(tiny_model_config.model_copy(update={"freeze": spec}), seed=11)
    before = {name: parameter.detach().clone() for name, parameter in model.named_parameters()}
    report = {entry.name: entry.frozen for entry in trainable_parameter_report(model)}

    train_steps(model)

    for name, parameter in model.named_parameters():
        if report[name]:
            assert torch.equal(parameter, before[name]), f"{name} изменился, хотя заморожен"
    assert any(
        not torch.equal(parameter, before[name])
        for name, parameter in model.named_parameters()
        if name.startswith("head.")
    )


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_all_frozen_head_still_gets_gradients(tiny_model_config: ModelConfig, seed: int):
    model = build_model(tiny_model_config.model_copy(update={"freeze": FreezeSpec.all(2)}), seed=seed)
    model.train()

    input_ids, attention_mask, _ = model.tokenize_batch(TEXTS)
    nn.CrossEntropyLoss()(model(input_ids, attention_mask), LABELS).backward()

    for name, parameter in model.named_parameters():
        if name.startswith("head."):
            assert parameter.grad is not None and torch.count_nonzero(parameter.grad) > 0, name
        else:
            assert parameter.grad is None, name


def test_freeze_report_matches_spec(tiny_model_config: ModelConfig):
    model = build_model(tiny_model_config.model_copy(update={"freeze": FreezeSpec.headline()}), seed=0)
    report = trainable_parameter_report(model)

    frozen = {entry.name for entry in report if entry.frozen}
    assert frozen
    assert all(name.startswith(("adapter.embeddings.", "adapter.layers.0.")) for name in frozen)
    assert not any(name.startswith(("adapter.layers.1.", "head.")) for name in frozen)


def test_parameter_report_lists_every_tensor_once(tiny_model_config: ModelConfig):
    model = build_model(tiny_model_config, seed=0)
    report = trainable_parameter_report(model)

    names = [entry.name for entry in report]
    assert len(names) == len(set(names))
    assert sum(entry.count for entry in report) == sum(parameter.numel() for parameter in model.parameters())


def test_freeze_deeper_than_backbone(tiny_model_config: ModelConfig):
    model = build_model(tiny_model_config, seed=0)
    with pytest.raises(BackboneError) as exc_info:
        apply_freeze(model, FreezeSpec(freeze_embeddings=True, frozen_encoder_layers=3))
    assert exc_info.value.extra == {"backbone_id": TINY_BACKBONE_ID, "depth": 2}


def test_apply_freeze_is_idempotent(tiny_model_config: ModelConfig):
    """Повторное применение пересчитывает флаги с нуля."""
    model = build_model(tiny_model_config.model_copy(update={"freeze": FreezeSpec.all(2)}), seed=0)
    apply_freeze(model, FreezeSpec.none())
    assert all(parameter.requires_grad for parameter in model.parameters())


def test_freeze_all_preset_uses_backbone_depth():
    assert backbone_depth(TINY_BACKBONE_ID) == 2
    assert FreezeSpec.from_preset("ALL", backbone_depth(TINY_BACKBONE_ID)) == FreezeSpec.all(2)
    assert FreezeSpec.from_preset("emb+1-2", 2) == FreezeSpec.ablation_best()


@pytest.mark.parametrize("name", ["HEADLINE", "paper_main", "EMB+1"])
def test_headline_preset_aliases(name):
    assert FreezeSpec.from_preset(name, 12) == FreezeSpec(freeze_embeddings=True, frozen_encoder_layers=1)
