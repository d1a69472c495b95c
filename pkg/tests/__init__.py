"""qgindex 测试"""
