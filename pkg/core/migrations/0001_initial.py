# Generated by Django 5.0 on 2026-10-17 12:00

import django.utils.timezone
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name='VerificationRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('series', models.CharField(choices=[('one-dim', 'Unidimensional'), ('pi', 'Pi'), ('rho12', 'Rho12'), ('rho1', 'Rho1'), ('rho2', 'Rho2'), ('hat-rho', 'Hat rho'), ('rho-full', 'Rho completa')], max_length=10)),
                ('phases', models.JSONField(blank=True, default=list)),
                ('q_value', models.FloatField()),
                ('cutoff', models.PositiveIntegerField()),
                ('margin', models.PositiveIntegerField()),
                ('passed', models.BooleanField(default=False)),
                ('report', models.JSONField(blank=True, default=dict)),
                ('task_id', models.CharField(blank=True, default='', max_length=64)),
                ('created_at', models.DateTimeField(default=django.utils.timezone.now)),
            ],
            options={
                'verbose_name': 'Execucao de verificacao',
                'verbose_name_plural': 'Execucoes de verificacao',
                'ordering': ['-created_at'],
                'indexes': [models.Index(fields=['series', 'q_value'], name='core_verifi_series_3f1a2b_idx')],
            },
        ),
    ]
